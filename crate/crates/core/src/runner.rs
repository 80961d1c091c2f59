//! End-to-end runs: read a config, evaluate, render a report and write the
//! output files.

use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, TimeDelta, Utc};
use thiserror::Error;

use crate::bound::{evaluate_series, plan, Alignment, BoundSeries, PlanInput, PlanOutput};
use crate::config::{self, ConfigError, Document};
use crate::fringe::{detect_collapse, simulate, CollapseReport, CountBin, InfluenceHypothesis, InfluenceSpeed};
use crate::io::{self, IoError};
use crate::record::ExperimentRecord;
use crate::scan::{scan, FrameGrid, ScanResult};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Domain(#[from] crate::Error),
    #[error("{path}: {source}")]
    Output { path: PathBuf, source: IoError },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: IoError },
}

impl RunError {
    /// Process exit status: 2 for config problems, 3 for domain errors,
    /// 1 for file I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Domain(_) => 3,
            Self::Output { .. } | Self::Input { .. } => 1,
        }
    }
}

type Result<T> = std::result::Result<T, RunError>;

/// A config file, read and parsed.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub document: Document,
    pub record: ExperimentRecord,
}

impl LoadedConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let document = Document::parse(text)?;
        let record = config::record_from_document(&document)?;
        Ok(Self { document, record })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            ConfigError {
                path: path.display().to_string(),
                message: e.to_string(),
            }
        })?;
        Self::from_text(&text)
    }
}

fn utc(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn at(start: DateTime<Utc>, seconds: f64) -> DateTime<Utc> {
    start + TimeDelta::milliseconds((seconds * 1e3).round() as i64)
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    let output = |e: std::io::Error| RunError::Output {
        path: path.clone(),
        source: e.into(),
    };
    fs::create_dir_all(dir).map_err(output)?;
    let file = File::create(&path).map_err(output)?;
    Ok((path, BufWriter::new(file)))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::create_dir_all(dir)
        .and_then(|_| fs::write(&path, text))
        .map_err(|e| RunError::Output { path, source: e.into() })
}

fn alignment_text(a: Alignment) -> String {
    match a {
        Alignment::Good => "good".into(),
        Alignment::Bad { attainable } => {
            format!("bad (attainable bound about {:.4e} c)", attainable / SPEED_OF_LIGHT)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeReport {
    pub name: Option<String>,
    pub frame: String,
    pub start: DateTime<Utc>,
    pub theta0: f64,
    pub phi0: f64,
    pub frame_speed: f64,
    pub samples: usize,
    pub crossings: Vec<f64>,
    pub alignment: Alignment,
    pub fringe_period: f64,
    /// Half-fringe bound (m/s).
    pub bound: f64,
    pub ceiling: f64,
}

impl AnalyzeReport {
    pub fn crossing_times(&self) -> Vec<DateTime<Utc>> {
        self.crossings.iter().map(|&t| at(self.start, t)).collect()
    }
}

impl fmt::Display for AnalyzeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = SPEED_OF_LIGHT;
        if let Some(name) = &self.name {
            writeln!(f, "experiment: {name}")?;
        }
        writeln!(f, "frame: {}", self.frame)?;
        writeln!(f, "frame_speed_km_s: {:.3}", self.frame_speed / 1e3)?;
        writeln!(f, "theta0_rad: {:.6}", self.theta0)?;
        writeln!(f, "phi0_rad: {:.6}", self.phi0)?;
        writeln!(f, "samples: {}", self.samples)?;
        writeln!(f, "alignment: {}", alignment_text(self.alignment))?;
        writeln!(f, "crossings: {}", self.crossings.len())?;
        for (t, when) in self.crossings.iter().zip(self.crossing_times()) {
            writeln!(f, "  {} (t = {:.3} s)", utc(when), t)?;
        }
        writeln!(f, "fringe_period_s: {}", self.fringe_period)?;
        writeln!(f, "bound_over_c: {}", crate::units::format_f64(self.bound / c))?;
        writeln!(f, "ceiling_over_c: {}", crate::units::format_f64(self.ceiling / c))?;
        Ok(())
    }
}

/// Evaluates the single-frame analysis without touching the filesystem.
pub fn analyze(record: &ExperimentRecord, step: f64) -> Result<(BoundSeries, AnalyzeReport)> {
    let series = evaluate_series(record, step)?;
    let report = AnalyzeReport {
        name: record.spec().name.clone(),
        frame: record.frame().name().to_string(),
        start: record.start(),
        theta0: record.theta0(),
        phi0: record.phi0(),
        frame_speed: record.lab_velocity_at(0.0)?.magnitude(),
        samples: series.samples.len(),
        crossings: series.crossings.clone(),
        alignment: series.alignment(),
        fringe_period: record.fringe_period(),
        bound: series.bound,
        ceiling: series.ceiling,
    };
    Ok((series, report))
}

/// Runs `analyze` and writes `series.csv` and `report.txt` to `out_dir`.
pub fn run_analyze(loaded: &LoadedConfig, step: f64, out_dir: Option<&Path>) -> Result<AnalyzeReport> {
    let (series, report) = analyze(&loaded.record, step)?;
    if let Some(dir) = out_dir {
        let (path, file) = create(dir, "series.csv")?;
        io::write_series(file, &series).map_err(|source| RunError::Output { path, source })?;
        write_text(dir, "report.txt", &report.to_string())?;
    }
    Ok(report)
}

/// Builds the frame grid from `[scan]`, defaulting to the 12×24 lattice at
/// the dipole speed.
pub fn scan_grid(doc: &Document) -> Result<FrameGrid> {
    let spec = config::scan_spec(doc)?;
    let grid = match spec.directions {
        Some(dirs) => FrameGrid::new(spec.speeds, dirs)?,
        None => FrameGrid::lattice(spec.speeds, spec.declination_bands, spec.right_ascension_bands)?,
    };
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSummary {
    pub result: ScanResult,
    pub cells: usize,
    pub failed: usize,
    pub good: usize,
    /// Smallest and largest successful bound (m/s).
    pub bound_range: Option<(f64, f64)>,
}

impl fmt::Display for ScanSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cells: {}", self.cells)?;
        writeln!(f, "failed: {}", self.failed)?;
        writeln!(f, "good_alignment: {}", self.good)?;
        if let Some((lo, hi)) = self.bound_range {
            writeln!(
                f,
                "bound_over_c: {:.6e} .. {:.6e}",
                lo / SPEED_OF_LIGHT,
                hi / SPEED_OF_LIGHT
            )?;
        }
        Ok(())
    }
}

pub fn run_scan(loaded: &LoadedConfig, step: f64, out_dir: Option<&Path>) -> Result<ScanSummary> {
    let grid = scan_grid(&loaded.document)?;
    let result = scan(&loaded.record, &grid, step);
    let ok: Vec<_> = result.rows.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
    let bound_range = ok.iter().fold(None, |acc: Option<(f64, f64)>, o| match acc {
        None => Some((o.bound, o.bound)),
        Some((lo, hi)) => Some((lo.min(o.bound), hi.max(o.bound))),
    });
    let summary = ScanSummary {
        cells: result.rows.len(),
        failed: result.rows.len() - ok.len(),
        good: ok.iter().filter(|o| o.alignment.is_good()).count(),
        bound_range,
        result,
    };
    if let Some(dir) = out_dir {
        let (path, file) = create(dir, "scan.csv")?;
        io::write_scan(file, &summary.result).map_err(|source| RunError::Output { path, source })?;
    }
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanReport {
    pub input: PlanInput,
    pub output: PlanOutput,
}

impl fmt::Display for PlanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = SPEED_OF_LIGHT;
        let (i, o) = (&self.input, &self.output);
        writeln!(f, "distance_m: {}", i.d_ab)?;
        writeln!(f, "achievable_alignment_m: {}", i.achievable_alignment)?;
        writeln!(f, "localization_s: {:e}", i.delta_tau)?;
        writeln!(f, "fringe_period_s: {}", i.fringe_period)?;
        writeln!(f, "frame_speed_km_s: {:.3}", i.frame_speed / 1e3)?;
        writeln!(f, "ceiling_over_c: {:.6e}", o.ceiling / c)?;
        writeln!(f, "required_r: {:.6e}", o.required_r)?;
        writeln!(f, "alignment: {}", alignment_text(o.alignment))?;
        match (o.rotation_limited_bound, o.required_fringe_time) {
            (Some(bound), Some(time)) => {
                writeln!(f, "rotation_limited_bound_over_c: {:.6e}", bound / c)?;
                writeln!(f, "required_fringe_time_s: {time:.6}")?;
            }
            _ => writeln!(f, "notice: simultaneity unreachable, the frame is at rest in the lab")?,
        }
        writeln!(f, "attainable_bound_over_c: {:.6e}", o.attainable_bound / c)?;
        Ok(())
    }
}

/// Plan inputs from the record, with `[plan]` overrides. The alignment
/// defaults to the largest `c|τ|` of the run and the frame speed to the
/// frame's speed relative to the lab at the start.
pub fn plan_input(loaded: &LoadedConfig) -> Result<PlanInput> {
    let o = config::plan_overrides(&loaded.document)?;
    let rec = &loaded.record;
    let spec = rec.spec();
    let frame_speed = match o.frame_speed {
        Some(v) => v,
        None => rec.lab_velocity_at(0.0)?.magnitude(),
    };
    Ok(PlanInput {
        d_ab: o.distance.unwrap_or(spec.d_ab),
        achievable_alignment: o
            .achievable_alignment
            .unwrap_or(SPEED_OF_LIGHT * spec.tau_start.abs().max(spec.tau_end.abs())),
        delta_tau: o.localization.unwrap_or(spec.localization),
        fringe_period: o.fringe_period.unwrap_or(spec.fringe_period),
        frame_speed,
    })
}

pub fn run_plan(loaded: &LoadedConfig, out_dir: Option<&Path>) -> Result<PlanReport> {
    let input = plan_input(loaded)?;
    let output = plan(&input, &loaded.record.constants())?;
    let report = PlanReport { input, output };
    if let Some(dir) = out_dir {
        write_text(dir, "plan.txt", &report.to_string())?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateReport {
    /// Seed used for the synthetic counts; `None` when counts were read in.
    pub seed: Option<u64>,
    pub hypothesis: InfluenceSpeed,
    pub bins: Vec<CountBin>,
    pub collapse: CollapseReport,
}

impl fmt::Display for SimulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.seed {
            Some(seed) => writeln!(f, "seed: {seed}")?,
            None => writeln!(f, "counts: external")?,
        }
        match self.hypothesis {
            InfluenceSpeed::Unbounded => writeln!(f, "hypothesis: unbounded")?,
            InfluenceSpeed::Finite(v) => writeln!(f, "hypothesis_over_c: {:e}", v / SPEED_OF_LIGHT)?,
        }
        writeln!(f, "bins: {}", self.bins.len())?;
        write!(f, "{}", self.collapse)
    }
}

/// Generates synthetic counts under the `[simulate]` hypothesis (or reads
/// them from `counts`) and runs collapse detection. A missing seed is drawn
/// at random and reported.
pub fn run_simulate(
    loaded: &LoadedConfig,
    seed: Option<u64>,
    counts: Option<&Path>,
    out_dir: Option<&Path>,
) -> Result<SimulateReport> {
    let rec = &loaded.record;
    let spec = config::simulate_spec(&loaded.document, rec)?;
    let hypothesis = InfluenceHypothesis::new(spec.hypothesis_speed, rec.frame().clone())?;
    let (seed, bins) = match counts {
        Some(path) => {
            let input = |source: IoError| RunError::Input {
                path: path.to_path_buf(),
                source,
            };
            let file = File::open(path).map_err(|e| input(e.into()))?;
            let bins = io::read_counts(file, rec.start()).map_err(input)?;
            let width = spec.model.bin_width;
            if let Some(w) = bins.windows(2).find(|w| (w[1].t_start - w[0].t_start - width).abs() > 1e-6) {
                return Err(crate::error::invalid(
                    "counts",
                    format!("bin at {} s does not follow the {width} s bin width", w[1].t_start),
                )
                .into());
            }
            (None, bins)
        }
        None => {
            let seed = seed.or(spec.seed).unwrap_or_else(rand::random);
            (Some(seed), simulate(rec, &spec.model, &hypothesis, seed)?)
        }
    };
    let collapse = detect_collapse(&bins, &spec.model)?;
    let report = SimulateReport {
        seed,
        hypothesis: spec.hypothesis_speed,
        bins,
        collapse,
    };
    if let Some(dir) = out_dir {
        if counts.is_none() {
            let (path, file) = create(dir, "counts.csv")?;
            io::write_counts(file, rec.start(), &report.bins).map_err(|source| RunError::Output { path, source })?;
        }
        write_text(dir, "collapse.txt", &report.to_string())?;
    }
    Ok(report)
}
