//! Minimum speed of quantum information in the lab and in a boosted frame,
//! its time series over a run, and the conservative half-fringe bound.

use std::collections::VecDeque;

use chrono::{DateTime, Utc};
use rayon::prelude::*;

use crate::celestial::OrbitalConstants;
use crate::error::{invalid, Error, Result};
use crate::record::ExperimentRecord;
use crate::SPEED_OF_LIGHT;

/// `|r + β_x|` at or below this counts as exact simultaneity.
pub const SIMULTANEITY_EPS: f64 = 1e-15;

/// Crossing refinement stops once the bracket is narrower than this (s).
pub const CROSSING_TOLERANCE: f64 = 1e-6;

/// Signed minimum speed, or unbounded when the detections are simultaneous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QiSpeed {
    Finite(f64),
    Unbounded,
}

impl QiSpeed {
    pub fn magnitude(&self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v.abs()),
            Self::Unbounded => None,
        }
    }

    /// `|v|` clamped to `ceiling`.
    pub fn clamped(&self, ceiling: f64) -> f64 {
        match self {
            Self::Finite(v) => v.abs().min(ceiling),
            Self::Unbounded => ceiling,
        }
    }

    pub fn exceeds(&self, limit: f64) -> bool {
        match self {
            Self::Finite(v) => v.abs() > limit,
            Self::Unbounded => true,
        }
    }
}

/// `(x_A − x_B)/(t_A − t_B) = −d_AB/τ` with `τ = t_A − t_B`.
pub fn v_qi_min_lab(d_ab: f64, tau: f64) -> Result<QiSpeed> {
    if !(d_ab.is_finite() && d_ab > 0.0) {
        return Err(invalid("baseline length", format!("{d_ab} m must be positive")));
    }
    if !tau.is_finite() {
        return Err(invalid("timing offset", format!("{tau} s is not finite")));
    }
    if tau == 0.0 {
        return Ok(QiSpeed::Unbounded);
    }
    Ok(QiSpeed::Finite(-d_ab / tau))
}

/// Minimum speed seen from a frame moving at `β_x` along the baseline:
/// `−c (1 + r β_x) / (r + β_x)`.
pub fn v_qi_min_boosted(r: f64, beta_x: f64) -> Result<QiSpeed> {
    if !(r.abs() < 1.0) {
        return Err(Error::NotSpaceLike(r.abs()));
    }
    if !(beta_x.abs() < 1.0) {
        return Err(invalid("boost", format!("|beta_x| = {} must be below 1", beta_x.abs())));
    }
    let denominator = r + beta_x;
    if denominator.abs() <= SIMULTANEITY_EPS {
        return Ok(QiSpeed::Unbounded);
    }
    Ok(QiSpeed::Finite(-SPEED_OF_LIGHT * (1.0 + r * beta_x) / denominator))
}

/// Largest resolvable speed given the photon localization.
pub fn localization_ceiling(d_ab: f64, delta_tau: f64) -> Result<f64> {
    if !(d_ab.is_finite() && d_ab > 0.0) || !(delta_tau.is_finite() && delta_tau > 0.0) {
        return Err(invalid(
            "localization ceiling",
            format!("d_ab = {d_ab} m and delta_tau = {delta_tau} s must be positive"),
        ));
    }
    Ok(d_ab / delta_tau)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alignment {
    /// Simultaneity in the frame is reachable.
    Good,
    /// `|r|` exceeds every `|β_x|`; the attainable speed is about `c/|r|`.
    Bad { attainable: f64 },
}

impl Alignment {
    pub fn is_good(&self) -> bool {
        matches!(self, Self::Good)
    }
}

pub fn classify_alignment(r_max: f64, beta_x_max: f64) -> Alignment {
    if r_max > beta_x_max {
        Alignment::Bad {
            attainable: SPEED_OF_LIGHT / r_max,
        }
    } else {
        Alignment::Good
    }
}

/// Linear drift of the detection offset over the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentProfile {
    tau_start: f64,
    tau_end: f64,
    localization: f64,
}

impl AlignmentProfile {
    pub fn new(tau_start: f64, tau_end: f64, localization: f64) -> Result<Self> {
        if !(tau_start.is_finite() && tau_end.is_finite()) {
            return Err(invalid("alignment", "timing offsets must be finite"));
        }
        if !(localization.is_finite() && localization > 0.0) {
            return Err(invalid("localization", format!("{localization} s must be positive")));
        }
        Ok(Self {
            tau_start,
            tau_end,
            localization,
        })
    }

    pub fn tau_start(&self) -> f64 {
        self.tau_start
    }

    pub fn tau_end(&self) -> f64 {
        self.tau_end
    }

    pub fn localization(&self) -> f64 {
        self.localization
    }

    pub fn tau_at(&self, t: f64, duration: f64) -> f64 {
        self.tau_start + (self.tau_end - self.tau_start) * (t / duration)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetupState {
    pub r: f64,
    pub beta_x: f64,
}

/// Alignment ratio and boost at `t` seconds into the run.
pub fn setup_state(record: &ExperimentRecord, t: f64) -> Result<SetupState> {
    let consts = record.constants();
    let r = SPEED_OF_LIGHT * record.tau_at(t) / record.baseline().d_ab();
    let v = record.frame_velocity_at(t)?;
    let beta_x = record.baseline().beta_x(t, &v, consts);
    Ok(SetupState { r, beta_x })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSample {
    pub t: f64,
    pub r: f64,
    pub beta_x: f64,
    pub v_qi_min: QiSpeed,
    /// `|v_qi_min|` is at or beyond the localization ceiling.
    pub capped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSeries {
    pub start: DateTime<Utc>,
    pub samples: Vec<SeriesSample>,
    /// Times (s from start) where `r + β_x = 0`.
    pub crossings: Vec<f64>,
    /// Half-fringe lower bound for the record's fringe period (m/s).
    pub bound: f64,
    pub ceiling: f64,
}

impl BoundSeries {
    pub fn r_max(&self) -> f64 {
        self.samples.iter().map(|s| s.r.abs()).fold(0.0, f64::max)
    }

    pub fn beta_x_max(&self) -> f64 {
        self.samples.iter().map(|s| s.beta_x.abs()).fold(0.0, f64::max)
    }

    pub fn alignment(&self) -> Alignment {
        classify_alignment(self.r_max(), self.beta_x_max())
    }
}

fn sample_times(duration: f64, step: f64) -> Vec<f64> {
    let mut times = Vec::with_capacity((duration / step) as usize + 2);
    let mut k = 0u64;
    loop {
        let t = k as f64 * step;
        if t >= duration {
            break;
        }
        times.push(t);
        k += 1;
    }
    times.push(duration);
    times
}

fn refine_crossing(record: &ExperimentRecord, mut lo: f64, mut hi: f64, mut g_lo: f64) -> Result<f64> {
    let g = |t: f64| setup_state(record, t).map(|s| s.r + s.beta_x);
    for _ in 0..200 {
        if hi - lo <= CROSSING_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if (g_lo < 0.0) == (g_mid < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Samples `|v_QI,min|(t)` over the run every `step` seconds (plus the end
/// point), locates simultaneity crossings and extracts the half-fringe
/// bound for the record's fringe period.
pub fn evaluate_series(record: &ExperimentRecord, step: f64) -> Result<BoundSeries> {
    if !(step.is_finite() && step > 0.0) {
        return Err(invalid("sampling step", format!("{step} s must be positive")));
    }
    let ceiling = localization_ceiling(record.baseline().d_ab(), record.alignment().localization())?;
    let times = sample_times(record.duration(), step);
    let samples = times
        .par_iter()
        .map(|&t| {
            let state = setup_state(record, t)?;
            let v_qi_min = v_qi_min_boosted(state.r, state.beta_x)?;
            Ok(SeriesSample {
                t,
                r: state.r,
                beta_x: state.beta_x,
                v_qi_min,
                capped: !(v_qi_min.clamped(ceiling) < ceiling),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut crossings = Vec::new();
    for (k, s) in samples.iter().enumerate() {
        let g = s.r + s.beta_x;
        if g == 0.0 {
            crossings.push(s.t);
            continue;
        }
        if let Some(next) = samples.get(k + 1) {
            let g_next = next.r + next.beta_x;
            if g_next != 0.0 && (g < 0.0) != (g_next < 0.0) {
                crossings.push(refine_crossing(record, s.t, next.t, g)?);
            }
        }
    }

    let bound = half_fringe_bound(&samples, ceiling, record.fringe_period())?;
    Ok(BoundSeries {
        start: record.start(),
        samples,
        crossings,
        bound,
        ceiling,
    })
}

/// Largest speed a finite influence could have without the observed fringes
/// being wiped out over a whole half fringe: the maximum, over windows of
/// length `fringe_period / 2`, of the smallest `|v_QI,min|` inside the
/// window, capped at the localization ceiling.
pub fn extract_bound(series: &BoundSeries, fringe_period: f64) -> Result<f64> {
    half_fringe_bound(&series.samples, series.ceiling, fringe_period)
}

fn half_fringe_bound(samples: &[SeriesSample], ceiling: f64, fringe_period: f64) -> Result<f64> {
    let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let speeds: Vec<f64> = samples.iter().map(|s| s.v_qi_min.clamped(ceiling)).collect();
    window_bound(&times, &speeds, ceiling, fringe_period)
}

/// Half-fringe bound over an already clamped speed profile. `times` must be
/// ascending; `speeds` and `ceiling` may be in any common unit.
pub fn window_bound(times: &[f64], speeds: &[f64], ceiling: f64, fringe_period: f64) -> Result<f64> {
    if !(fringe_period.is_finite() && fringe_period > 0.0) {
        return Err(invalid("fringe period", format!("{fringe_period} s must be positive")));
    }
    if times.len() != speeds.len() {
        return Err(invalid("series", "time and speed columns differ in length"));
    }
    let (Some(&first), Some(&last)) = (times.first(), times.last()) else {
        return Err(invalid("series", "no samples"));
    };
    if times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("series", "sample times must be strictly increasing"));
    }
    let window = 0.5 * fringe_period;
    let span = last - first;
    let slack = 1e-9 * span.max(1.0);
    if window > span + slack {
        return Err(Error::WindowTooLong { window, span });
    }

    // sliding-window minimum over a monotone deque
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    let mut best = f64::NEG_INFINITY;
    for (i, &t) in times.iter().enumerate() {
        let window_end = t + window;
        if window_end > last + slack {
            break;
        }
        while next < times.len() && times[next] <= window_end + slack {
            while queue.back().is_some_and(|&j| speeds[j] >= speeds[next]) {
                queue.pop_back();
            }
            queue.push_back(next);
            next += 1;
        }
        while queue.front().is_some_and(|&j| j < i) {
            queue.pop_front();
        }
        if let Some(&j) = queue.front() {
            best = best.max(speeds[j]);
        }
    }
    Ok(best.min(ceiling))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanInput {
    /// Detector separation (m).
    pub d_ab: f64,
    /// Achievable alignment `c·|τ|` (m).
    pub achievable_alignment: f64,
    /// Photon localization (s).
    pub delta_tau: f64,
    /// Time to record one fringe (s).
    pub fringe_period: f64,
    /// Speed of the candidate frame relative to the lab (m/s).
    pub frame_speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanOutput {
    pub ceiling: f64,
    /// Largest `|r|` for which simultaneity in the frame is reachable.
    pub required_r: f64,
    pub alignment: Alignment,
    /// Bound limited by the Earth's rotation for the given fringe time;
    /// `None` when the frame is at rest (simultaneity unreachable).
    pub rotation_limited_bound: Option<f64>,
    pub attainable_bound: f64,
    /// Fringe time at which the rotation limit meets the ceiling.
    pub required_fringe_time: Option<f64>,
}

impl PlanOutput {
    pub fn simultaneity_reachable(&self) -> bool {
        self.required_r > 0.0
    }
}

/// Projects the bound a future run could reach.
///
/// Near a crossing `r + β_x` changes at most at `(v/c)·ω_d`. With the
/// half-fringe window centred on the crossing its edges sit `T/4` away,
/// so the rotation-limited bound is `4c² / (v ω_d T)`. Real baselines turn
/// more slowly than this worst case, so the projection is conservative.
pub fn plan(input: &PlanInput, consts: &OrbitalConstants) -> Result<PlanOutput> {
    let positive = [
        ("d_ab", input.d_ab),
        ("delta_tau", input.delta_tau),
        ("fringe_period", input.fringe_period),
    ];
    for (name, value) in positive {
        if !(value.is_finite() && value > 0.0) {
            return Err(invalid("plan input", format!("{name} = {value} must be positive")));
        }
    }
    for (name, value) in [
        ("achievable_alignment", input.achievable_alignment),
        ("frame_speed", input.frame_speed),
    ] {
        if !(value.is_finite() && value >= 0.0) {
            return Err(invalid("plan input", format!("{name} = {value} must be non-negative")));
        }
    }
    if input.frame_speed >= SPEED_OF_LIGHT {
        return Err(Error::InvalidSpeed {
            value: input.frame_speed,
            reason: "not below c",
        });
    }
    let c = SPEED_OF_LIGHT;
    let ceiling = localization_ceiling(input.d_ab, input.delta_tau)?;
    let required_r = input.frame_speed / c;
    let alignment = classify_alignment(input.achievable_alignment / input.d_ab, required_r);
    let slope = input.frame_speed * consts.omega_d();
    let (rotation_limited_bound, required_fringe_time) = if slope > 0.0 {
        (
            Some(4.0 * c * c / (slope * input.fringe_period)),
            Some(4.0 * c * c / (slope * ceiling)),
        )
    } else {
        (None, None)
    };
    let attainable_bound = match alignment {
        Alignment::Bad { attainable } => attainable.min(ceiling),
        Alignment::Good => rotation_limited_bound.map_or(ceiling, |b| b.min(ceiling)),
    };
    Ok(PlanOutput {
        ceiling,
        required_r,
        alignment,
        rotation_limited_bound,
        attainable_bound,
        required_fringe_time,
    })
}
