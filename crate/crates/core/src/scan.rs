//! Sweep of candidate frames: alignment class, crossings and bound per cell.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::bound::{evaluate_series, Alignment};
use crate::celestial::{EquatorialDirection, GALILEAN_LIMIT};
use crate::error::{invalid, Error, Result};
use crate::record::{ExperimentRecord, FrameSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct FrameGrid {
    speeds: Vec<f64>,
    directions: Vec<EquatorialDirection>,
}

impl FrameGrid {
    pub fn new(speeds: Vec<f64>, directions: Vec<EquatorialDirection>) -> Result<Self> {
        if speeds.is_empty() || directions.is_empty() {
            return Err(invalid("frame grid", "needs at least one speed and one direction"));
        }
        if let Some(&bad) = speeds
            .iter()
            .find(|v| !(v.is_finite() && **v >= 0.0 && **v < crate::SPEED_OF_LIGHT))
        {
            return Err(Error::InvalidSpeed {
                value: bad,
                reason: "grid speeds must lie in [0, c)",
            });
        }
        Ok(Self { speeds, directions })
    }

    /// Equal-area lattice: `dec_bands` bands uniform in `sin δ`, each split
    /// into `ra_bands` cells uniform in right ascension. Cell centres only.
    pub fn lattice(speeds: Vec<f64>, dec_bands: usize, ra_bands: usize) -> Result<Self> {
        if dec_bands == 0 || ra_bands == 0 {
            return Err(invalid("frame grid", "lattice needs at least one band each way"));
        }
        let mut directions = Vec::with_capacity(dec_bands * ra_bands);
        for i in 0..dec_bands {
            let sin_dec = -1.0 + (2.0 * i as f64 + 1.0) / dec_bands as f64;
            let dec = sin_dec.asin();
            for j in 0..ra_bands {
                let ra = TAU * (j as f64 + 0.5) / ra_bands as f64;
                directions.push(EquatorialDirection::new(ra, dec)?);
            }
        }
        Self::new(speeds, directions)
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn directions(&self) -> &[EquatorialDirection] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.speeds.len() * self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell `k` pairs speed `k / n_dir` with direction `k % n_dir`.
    pub fn cell(&self, index: usize) -> (f64, EquatorialDirection) {
        let n = self.directions.len();
        (self.speeds[index / n], self.directions[index % n])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOutcome {
    pub alignment: Alignment,
    pub n_crossings: usize,
    /// Half-fringe bound (m/s).
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub cell: usize,
    pub speed: f64,
    pub direction: EquatorialDirection,
    pub outcome: std::result::Result<CellOutcome, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
}

pub fn scan_cell(record: &ExperimentRecord, speed: f64, direction: EquatorialDirection, step: f64) -> Result<CellOutcome> {
    if speed >= GALILEAN_LIMIT {
        return Err(Error::GalileanRegime {
            label: "candidate frame".into(),
            magnitude: speed,
        });
    }
    let frame = FrameSpec::Moving {
        name: "candidate".into(),
        speed,
        direction,
    };
    let series = evaluate_series(&record.with_frame(frame)?, step)?;
    Ok(CellOutcome {
        alignment: series.alignment(),
        n_crossings: series.crossings.len(),
        bound: series.bound,
    })
}

/// Runs the single-frame analysis for every grid cell. Cells are
/// independent; failures become error rows and never abort the scan.
pub fn scan(record: &ExperimentRecord, grid: &FrameGrid, step: f64) -> ScanResult {
    let rows = (0..grid.len())
        .into_par_iter()
        .map(|cell| {
            let (speed, direction) = grid.cell(cell);
            ScanRow {
                cell,
                speed,
                direction,
                outcome: scan_cell(record, speed, direction, step),
            }
        })
        .collect();
    ScanResult { rows }
}
