//! The experiment record: everything needed to evaluate one run.

use chrono::{DateTime, Utc};

use crate::baseline::{vernal_hour_angle, Baseline, Station};
use crate::bound::AlignmentProfile;
use crate::celestial::{
    compose_galilean, earth_sun_velocity, frame_relative_to_lab, seconds_between, site_spin_velocity,
    sun_frame_velocity, EquatorialDirection, Epoch, FrameVelocity, OrbitalConstants,
};
use crate::error::{invalid, Result};

/// Candidate preferred frame.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameSpec {
    /// The laboratory itself: zero relative velocity, no Earth-motion terms.
    Lab,
    /// A frame relative to which the Sun moves at `speed` towards
    /// `direction`. The lab velocity adds the Earth's orbital and spin terms.
    Moving {
        name: String,
        speed: f64,
        direction: EquatorialDirection,
    },
}

impl FrameSpec {
    pub const CMB_SPEED: f64 = 371e3;
    pub const CMB_RA_HOURS: f64 = 11.20;
    pub const CMB_DEC_DEGREES: f64 = -7.22;

    /// The cosmic microwave background rest frame.
    pub fn cmb() -> Self {
        Self::Moving {
            name: "CMB".into(),
            speed: Self::CMB_SPEED,
            direction: EquatorialDirection::from_hours_degrees(Self::CMB_RA_HOURS, Self::CMB_DEC_DEGREES)
                .expect("dipole direction is valid"),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Lab => "lab",
            Self::Moving { name, .. } => name,
        }
    }
}

/// User-facing description of a run. [`ExperimentRecord::new`] validates it
/// and derives the epoch and the sidereal phase.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordSpec {
    pub name: Option<String>,
    pub station_a: Station,
    pub station_b: Station,
    /// Detector separation (m).
    pub d_ab: f64,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    /// Signed detection offset `t_A − t_B` at start and end (s).
    pub tau_start: f64,
    pub tau_end: f64,
    /// Photon localization (s).
    pub localization: f64,
    pub fringe_period: f64,
    pub frame: FrameSpec,
    pub constants: OrbitalConstants,
    /// Overrides the orbital phase `θ_0` derived from the equinox table.
    pub theta0: Option<f64>,
    /// Overrides the sidereal phase `φ_0` derived from `start`.
    pub phi0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    spec: RecordSpec,
    baseline: Baseline,
    alignment: AlignmentProfile,
    epoch: Epoch,
    duration: f64,
}

impl ExperimentRecord {
    pub fn new(spec: RecordSpec) -> Result<Self> {
        spec.constants.validate()?;
        let duration = seconds_between(&spec.start, &spec.end);
        if !(duration > 0.0) {
            return Err(invalid("experiment window", "end must be after start"));
        }
        if !(spec.fringe_period.is_finite() && spec.fringe_period > 0.0) {
            return Err(invalid("fringe period", format!("{} s must be positive", spec.fringe_period)));
        }
        if let FrameSpec::Moving { speed, direction, .. } = &spec.frame {
            sun_frame_velocity(direction, *speed)?;
        }
        let alignment = AlignmentProfile::new(spec.tau_start, spec.tau_end, spec.localization)?;
        let epoch = match spec.theta0 {
            Some(theta0) => Epoch::with_orbital_phase(spec.start, theta0, &spec.constants)?,
            None => Epoch::at(spec.start, &spec.constants)?,
        };
        let phi0 = spec
            .phi0
            .unwrap_or_else(|| vernal_hour_angle(&spec.station_a, &spec.start));
        let baseline = Baseline::new(spec.station_a.clone(), spec.station_b.clone(), spec.d_ab, phi0)?;
        Ok(Self {
            spec,
            baseline,
            alignment,
            epoch,
            duration,
        })
    }

    /// Same run analysed in a different candidate frame.
    pub fn with_frame(&self, frame: FrameSpec) -> Result<Self> {
        let mut spec = self.spec.clone();
        spec.frame = frame;
        Self::new(spec)
    }

    pub fn spec(&self) -> &RecordSpec {
        &self.spec
    }

    pub fn baseline(&self) -> &Baseline {
        &self.baseline
    }

    pub fn alignment(&self) -> &AlignmentProfile {
        &self.alignment
    }

    pub fn epoch(&self) -> &Epoch {
        &self.epoch
    }

    pub fn constants(&self) -> &OrbitalConstants {
        &self.spec.constants
    }

    pub fn frame(&self) -> &FrameSpec {
        &self.spec.frame
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.spec.start
    }

    pub fn end(&self) -> DateTime<Utc> {
        self.spec.end
    }

    /// Window length (s).
    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn fringe_period(&self) -> f64 {
        self.spec.fringe_period
    }

    /// Orbital phase `θ_0`.
    pub fn theta0(&self) -> f64 {
        self.epoch.orbital_phase(&self.spec.constants)
    }

    /// Sidereal phase `φ_0` of station A.
    pub fn phi0(&self) -> f64 {
        self.baseline.phi0()
    }

    /// Signed offset `t_A − t_B` at `t` seconds after start.
    pub fn tau_at(&self, t: f64) -> f64 {
        self.alignment.tau_at(t, self.duration)
    }

    /// Velocity of the laboratory (station A) relative to the candidate
    /// frame at `t`.
    pub fn lab_velocity_at(&self, t: f64) -> Result<FrameVelocity> {
        match &self.spec.frame {
            FrameSpec::Lab => Ok(FrameVelocity::zero("lab relative to lab")),
            FrameSpec::Moving { name, speed, direction } => {
                let consts = &self.spec.constants;
                let a = self.baseline.a();
                let phi = self.baseline.station_azimuth(a, t, consts);
                let parts = [
                    site_spin_velocity(a.latitude(), phi, consts)?,
                    earth_sun_velocity(&self.epoch, consts),
                    sun_frame_velocity(direction, *speed)?,
                ];
                Ok(compose_galilean(&parts)?.with_label(format!("lab relative to {name}")))
            }
        }
    }

    /// Velocity of the candidate frame relative to the laboratory at `t`.
    pub fn frame_velocity_at(&self, t: f64) -> Result<FrameVelocity> {
        Ok(frame_relative_to_lab(&self.lab_velocity_at(t)?))
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fixture_lab_velocity_components() {
        // golden values from tests/oracle/geneva_oracle.py
        let v = geneva().lab_velocity_at(0.0).unwrap();
        let c = v.vector();
        assert_relative_eq!(c.x, -388_519.058_818_173_5, max_relative = 1e-9);
        assert_relative_eq!(c.y, 84_977.945_617_154_31, max_relative = 1e-9);
        assert_relative_eq!(c.z, -50_389.778_850_557_74, max_relative = 1e-9);
    }

    #[test]
    fn lab_frame_has_zero_velocity() {
        let mut spec = geneva_spec();
        spec.frame = FrameSpec::Lab;
        let rec = ExperimentRecord::new(spec).unwrap();
        assert_eq!(rec.frame_velocity_at(100.0).unwrap().magnitude(), 0.0);
    }

    #[test]
    fn overrides_take_precedence() {
        let mut spec = geneva_spec();
        spec.theta0 = Some(1.24);
        spec.phi0 = Some(2.247);
        let rec = ExperimentRecord::new(spec).unwrap();
        assert_relative_eq!(rec.theta0(), 1.24, epsilon = 1e-12);
        assert_relative_eq!(rec.phi0(), 2.247, epsilon = 1e-12);
    }

    #[test]
    fn rejects_inverted_window() {
        let mut spec = geneva_spec();
        std::mem::swap(&mut spec.start, &mut spec.end);
        assert!(ExperimentRecord::new(spec).is_err());
    }

    #[test]
    fn tau_is_linear() {
        let rec = geneva();
        let c = crate::SPEED_OF_LIGHT;
        assert_relative_eq!(rec.tau_at(0.0) * c, 0.002, epsilon = 1e-15);
        assert_relative_eq!(rec.tau_at(rec.duration()) * c, 0.014, epsilon = 1e-15);
        assert_relative_eq!(rec.tau_at(rec.duration() / 2.0) * c, 0.008, epsilon = 1e-15);
    }
}
