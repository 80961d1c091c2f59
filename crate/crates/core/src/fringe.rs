//! Synthetic coincidence fringes under a finite influence speed, and
//! detection of the resulting visibility collapse.
//!
//! If a preferred frame exists and influences travel at a finite `v_hyp`,
//! correlations vanish whenever `|v_QI,min(t)|` exceeds `v_hyp`. The
//! simulator injects that collapse; the detector looks for it with sliding
//! half-fringe visibility fits.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{DiscreteCDF, Poisson};

use crate::bound::{setup_state, v_qi_min_boosted, QiSpeed};
use crate::error::{invalid, Error, Result};
use crate::record::{ExperimentRecord, FrameSpec};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeModel {
    /// Mean coincidence rate (1/s).
    pub base_rate: f64,
    /// Visibility of intact fringes, in (0, 1].
    pub visibility: f64,
    pub fringe_period: f64,
    pub bin_width: f64,
    /// Fringe phase at `t = 0` (rad).
    pub phase_at_t0: f64,
    /// Visibility while correlations are suppressed.
    pub collapsed_visibility: f64,
}

impl FringeModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("base_rate", self.base_rate),
            ("fringe_period", self.fringe_period),
            ("bin_width", self.bin_width),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid("fringe model", format!("{name} = {v} must be positive")));
            }
        }
        for (name, v) in [
            ("visibility", self.visibility),
            ("collapsed_visibility", self.collapsed_visibility),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid("fringe model", format!("{name} = {v} must lie in [0, 1]")));
            }
        }
        if !self.phase_at_t0.is_finite() {
            return Err(invalid("fringe model", "phase must be finite"));
        }
        Ok(())
    }

    pub fn phase_at(&self, t: f64) -> f64 {
        TAU * t / self.fringe_period + self.phase_at_t0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InfluenceSpeed {
    Finite(f64),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceHypothesis {
    speed: InfluenceSpeed,
    frame: FrameSpec,
}

impl InfluenceHypothesis {
    pub fn new(speed: InfluenceSpeed, frame: FrameSpec) -> Result<Self> {
        if let InfluenceSpeed::Finite(v) = speed {
            if !(v.is_finite() && v > SPEED_OF_LIGHT) {
                return Err(Error::InvalidSpeed {
                    value: v,
                    reason: "a hypothetical influence speed must exceed c",
                });
            }
        }
        Ok(Self { speed, frame })
    }

    pub fn speed(&self) -> InfluenceSpeed {
        self.speed
    }

    pub fn frame(&self) -> &FrameSpec {
        &self.frame
    }

    /// Whether an influence at this speed would have arrived in time.
    pub fn keeps_correlations(&self, v_qi_min: QiSpeed) -> bool {
        match self.speed {
            InfluenceSpeed::Unbounded => true,
            InfluenceSpeed::Finite(v) => !v_qi_min.exceeds(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedBin {
    pub t_start: f64,
    pub lambda: f64,
    pub collapsed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountBin {
    /// Bin start (s from the run start).
    pub t_start: f64,
    pub counts: u64,
}

fn bin_count(record: &ExperimentRecord, model: &FringeModel) -> Result<usize> {
    let n = (record.duration() / model.bin_width + 1e-9).floor();
    if n < 1.0 {
        return Err(Error::TooShort {
            needed: model.bin_width,
            got: record.duration(),
        });
    }
    Ok(n as usize)
}

/// Expected coincidences per bin:
/// `λ = rate·width·(1 + V(t) cos(2πt/T + φ0))`, with `V(t)` dropping to the
/// collapsed visibility wherever the hypothesis cannot keep up.
pub fn expected_counts(
    record: &ExperimentRecord,
    model: &FringeModel,
    hyp: &InfluenceHypothesis,
) -> Result<Vec<ExpectedBin>> {
    model.validate()?;
    let framed = record.with_frame(hyp.frame.clone())?;
    (0..bin_count(record, model)?)
        .map(|k| {
            let t_start = k as f64 * model.bin_width;
            let centre = t_start + 0.5 * model.bin_width;
            let state = setup_state(&framed, centre)?;
            let keeps = hyp.keeps_correlations(v_qi_min_boosted(state.r, state.beta_x)?);
            let visibility = if keeps {
                model.visibility
            } else {
                model.collapsed_visibility
            };
            let modulation = (1.0 + visibility * model.phase_at(centre).cos()).max(0.0);
            Ok(ExpectedBin {
                t_start,
                lambda: model.base_rate * model.bin_width * modulation,
                collapsed: !keeps,
            })
        })
        .collect()
}

/// Intervals `(start, end)` of consecutive collapsed bins.
pub fn injected_intervals(bins: &[ExpectedBin], bin_width: f64) -> Vec<(f64, f64)> {
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<f64> = None;
    for b in bins {
        match (b.collapsed, open) {
            (true, None) => open = Some(b.t_start),
            (false, Some(start)) => {
                intervals.push((start, b.t_start));
                open = None;
            }
            _ => {}
        }
    }
    if let (Some(start), Some(last)) = (open, bins.last()) {
        intervals.push((start, last.t_start + bin_width));
    }
    intervals
}

/// Generator for bin `index`: ChaCha8 keyed by `seed`, stream `index`.
/// Each bin draws from its own stream, so bins can be produced in any
/// order or in parallel with identical results.
pub fn bin_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Poisson deviate by inversion of the CDF at a single uniform draw.
pub fn poisson_inverse_cdf(lambda: f64, u: f64) -> u64 {
    if !(lambda > 0.0) {
        return 0;
    }
    match Poisson::new(lambda) {
        Ok(dist) => dist.inverse_cdf(u),
        Err(_) => 0,
    }
}

pub fn simulate(
    record: &ExperimentRecord,
    model: &FringeModel,
    hyp: &InfluenceHypothesis,
    seed: u64,
) -> Result<Vec<CountBin>> {
    let expected = expected_counts(record, model, hyp)?;
    Ok(expected
        .iter()
        .enumerate()
        .map(|(k, bin)| {
            let u: f64 = bin_rng(seed, k as u64).random();
            CountBin {
                t_start: bin.t_start,
                counts: poisson_inverse_cdf(bin.lambda, u),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityWindow {
    pub t_start: f64,
    pub t_end: f64,
    /// In-phase visibility estimate `b / a`.
    pub visibility: f64,
    pub sigma: f64,
    pub collapsed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseReport {
    pub windows: Vec<VisibilityWindow>,
    pub threshold: f64,
    pub collapsed: bool,
    /// Hull of all collapsed windows.
    pub collapse_interval: Option<(f64, f64)>,
}

/// Weighted least-squares fit of `a + b cos φ + c sin φ` with Poisson
/// weights. Returns `(b/a, σ(b/a))`.
fn fit_visibility(bins: &[CountBin], model: &FringeModel) -> Option<(f64, f64)> {
    let mut normal = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for bin in bins {
        let phase = model.phase_at(bin.t_start + 0.5 * model.bin_width);
        let x = Vector3::new(1.0, phase.cos(), phase.sin());
        let y = bin.counts as f64;
        let w = 1.0 / y.max(1.0);
        normal += x * x.transpose() * w;
        rhs += x * (w * y);
    }
    let cov = normal.try_inverse()?;
    let p = cov * rhs;
    let (a, b) = (p[0], p[1]);
    if !(a > 0.0) {
        return None;
    }
    let var = cov[(1, 1)] / (a * a) + b * b * cov[(0, 0)] / a.powi(4) - 2.0 * b * cov[(0, 1)] / a.powi(3);
    Some((b / a, var.max(0.0).sqrt()))
}

/// Slides a half-fringe window one bin at a time and flags windows whose
/// visibility lies below half the nominal value at 3σ.
pub fn detect_collapse(bins: &[CountBin], model: &FringeModel) -> Result<CollapseReport> {
    model.validate()?;
    let covered = bins.len() as f64 * model.bin_width;
    if covered + 1e-9 < model.fringe_period {
        return Err(Error::TooShort {
            needed: model.fringe_period,
            got: covered,
        });
    }
    let width = (0.5 * model.fringe_period / model.bin_width).round().max(1.0) as usize;
    if width < 3 {
        return Err(invalid("fringe model", "half a fringe must span at least 3 bins"));
    }
    let threshold = 0.5 * model.visibility;
    let windows: Vec<VisibilityWindow> = bins
        .windows(width)
        .map(|w| {
            let t_start = w[0].t_start;
            let t_end = w[width - 1].t_start + model.bin_width;
            match fit_visibility(w, model) {
                Some((visibility, sigma)) => VisibilityWindow {
                    t_start,
                    t_end,
                    visibility,
                    sigma,
                    collapsed: visibility + 3.0 * sigma < threshold,
                },
                None => VisibilityWindow {
                    t_start,
                    t_end,
                    visibility: 0.0,
                    sigma: f64::INFINITY,
                    collapsed: false,
                },
            }
        })
        .collect();
    let flagged = windows.iter().filter(|w| w.collapsed);
    let collapse_interval = flagged.fold(None, |acc: Option<(f64, f64)>, w| match acc {
        None => Some((w.t_start, w.t_end)),
        Some((a, b)) => Some((a.min(w.t_start), b.max(w.t_end))),
    });
    Ok(CollapseReport {
        collapsed: collapse_interval.is_some(),
        windows,
        threshold,
        collapse_interval,
    })
}

impl fmt::Display for CollapseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "collapsed: {}", self.collapsed)?;
        match self.collapse_interval {
            Some((a, b)) => writeln!(f, "collapse_interval_s: {a} .. {b}")?,
            None => writeln!(f, "collapse_interval_s: none")?,
        }
        writeln!(f, "threshold_visibility: {}", self.threshold)?;
        writeln!(f, "windows: {}", self.windows.len())?;
        let (lo, hi) = self
            .windows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), w| {
                (lo.min(w.visibility), hi.max(w.visibility))
            });
        if !self.windows.is_empty() {
            writeln!(f, "visibility_range: {lo:.4} .. {hi:.4}")?;
        }
        Ok(())
    }
}
