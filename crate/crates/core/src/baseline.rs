//! Station geometry and the rotating unit vector from detector A to detector B.

use std::f64::consts::FRAC_PI_2;

use chrono::{DateTime, Utc};
use nalgebra::Vector3;

use crate::celestial::{unix_seconds, wrap_two_pi, FrameVelocity, OrbitalConstants};
use crate::error::{invalid, Error, Result};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Clone, PartialEq)]
pub struct Station {
    name: String,
    latitude: f64,
    longitude: f64,
}

impl Station {
    /// Geodetic latitude (north positive) and longitude (east positive) in
    /// radians.
    pub fn new(name: impl Into<String>, latitude: f64, longitude: f64) -> Result<Self> {
        if !latitude.is_finite() || latitude.abs() > FRAC_PI_2 {
            return Err(Error::InvalidAngle {
                what: "latitude",
                value: latitude,
            });
        }
        if !longitude.is_finite() {
            return Err(Error::InvalidAngle {
                what: "longitude",
                value: longitude,
            });
        }
        Ok(Self {
            name: name.into(),
            latitude,
            longitude,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }

    pub fn colatitude(&self) -> f64 {
        FRAC_PI_2 - self.latitude
    }
}

/// Two stations, their physical detector separation and the sidereal phase
/// of the experiment start.
///
/// The phase is stored relative to the Greenwich meridian so that each
/// station's azimuth is computed the same way whichever end is `a`; this
/// makes [`Baseline::swapped`] negate the unit vector bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    a: Station,
    b: Station,
    d_ab: f64,
    greenwich_phase: f64,
}

impl Baseline {
    /// `phi0` is the azimuth of `a`'s meridian measured from the vernal point
    /// at `t = 0`.
    pub fn new(a: Station, b: Station, d_ab: f64, phi0: f64) -> Result<Self> {
        if !(d_ab.is_finite() && d_ab > 0.0) {
            return Err(invalid("baseline length", format!("{d_ab} m must be positive")));
        }
        if !phi0.is_finite() {
            return Err(Error::InvalidAngle {
                what: "phi0",
                value: phi0,
            });
        }
        let baseline = Self {
            greenwich_phase: phi0 - a.longitude,
            a,
            b,
            d_ab,
        };
        if baseline.chord(0.0).norm() < 1e-12 {
            return Err(Error::DegenerateBaseline(
                baseline.a.name.clone(),
                baseline.b.name.clone(),
            ));
        }
        Ok(baseline)
    }

    pub fn a(&self) -> &Station {
        &self.a
    }

    pub fn b(&self) -> &Station {
        &self.b
    }

    /// Straight-line detector separation (m).
    pub fn d_ab(&self) -> f64 {
        self.d_ab
    }

    /// Azimuth of `a`'s meridian from the vernal point at `t = 0`.
    pub fn phi0(&self) -> f64 {
        self.greenwich_phase + self.a.longitude
    }

    /// Signed longitude offset `λ_B − λ_A`, wrapped into `(-π, π]`.
    pub fn longitude_offset(&self) -> f64 {
        crate::celestial::wrap_pi(self.b.longitude - self.a.longitude)
    }

    /// The same baseline seen from the other end.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
            d_ab: self.d_ab,
            greenwich_phase: self.greenwich_phase,
        }
    }

    /// Azimuth of a station's meridian from the vernal point at time `t`.
    pub fn station_azimuth(&self, station: &Station, t: f64, consts: &OrbitalConstants) -> f64 {
        self.greenwich_phase + station.longitude + consts.omega_d() * t
    }

    /// `B − A` on the unit sphere, in half-sum/half-difference form so that
    /// the two nearby points do not cancel catastrophically. The z component
    /// and the norm are independent of `t` by construction.
    fn chord_with_rate(&self, t: f64, omega_d: f64) -> Vector3<f64> {
        let (theta_a, theta_b) = (self.a.colatitude(), self.b.colatitude());
        let half_dtheta = 0.5 * (theta_b - theta_a);
        let mean_theta = 0.5 * (theta_a + theta_b);
        let half_dphi = 0.5 * (self.b.longitude - self.a.longitude);
        let mean_phi = self.greenwich_phase + 0.5 * (self.a.longitude + self.b.longitude) + omega_d * t;
        let radial = mean_theta.cos() * half_dtheta.sin();
        let along = mean_theta.sin() * half_dtheta.cos();
        let (sin_m, cos_m) = mean_phi.sin_cos();
        let (sin_h, cos_h) = half_dphi.sin_cos();
        Vector3::new(
            radial * cos_m * cos_h - along * sin_m * sin_h,
            radial * sin_m * cos_h + along * cos_m * sin_h,
            -mean_theta.sin() * half_dtheta.sin(),
        ) * 2.0
    }

    fn chord(&self, t: f64) -> Vector3<f64> {
        self.chord_with_rate(t, 0.0)
    }

    /// Unit vector from A to B at `t` seconds after the start.
    pub fn unit_baseline(&self, t: f64, consts: &OrbitalConstants) -> Vector3<f64> {
        let chord = self.chord_with_rate(t, consts.omega_d());
        chord / chord.norm()
    }

    /// Projection of a frame velocity on the baseline, in units of `c`.
    pub fn beta_x(&self, t: f64, v_frame_rel_lab: &FrameVelocity, consts: &OrbitalConstants) -> f64 {
        v_frame_rel_lab.vector().dot(&self.unit_baseline(t, consts)) / SPEED_OF_LIGHT
    }

    pub fn sample(&self, t: f64, v_frame_rel_lab: &FrameVelocity, consts: &OrbitalConstants) -> BaselineSample {
        let e_x = self.unit_baseline(t, consts);
        BaselineSample {
            t,
            e_x,
            beta_x: v_frame_rel_lab.vector().dot(&e_x) / SPEED_OF_LIGHT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineSample {
    pub t: f64,
    pub e_x: Vector3<f64>,
    pub beta_x: f64,
}

/// Greenwich mean sidereal angle (rad) at `utc`.
///
/// Low-precision IAU 1982 expression referred to J2000.0
/// (JD 2451545.0, 2000-01-01T12:00 TT, UT used for TT), good to well under
/// a second of time for the 1990–2030 range:
///
/// ```text
/// θ = 280.46061837° + 360.98564736629°·D + 0.000387933°·T² − T³/38710000°
/// ```
///
/// with `D` days and `T` Julian centuries since J2000.0.
pub fn greenwich_mean_sidereal_angle(utc: &DateTime<Utc>) -> f64 {
    // J2000.0 is 2000-01-01T12:00:00Z = Unix 946 728 000
    let d = (unix_seconds(utc) - 946_728_000.0) / 86400.0;
    let t = d / 36_525.0;
    let degrees = 280.460_618_37 + 360.985_647_366_29 * d + 0.000_387_933 * t * t - t * t * t / 38_710_000.0;
    wrap_two_pi(degrees.rem_euclid(360.0).to_radians())
}

/// Azimuth of the station's meridian from the vernal point (its local
/// sidereal angle).
pub fn vernal_hour_angle(station: &Station, utc: &DateTime<Utc>) -> f64 {
    wrap_two_pi(greenwich_mean_sidereal_angle(utc) + station.longitude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::celestial::{from_unix_seconds, EquatorialDirection};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn dm(d: f64, m: f64) -> f64 {
        (d + m / 60.0).to_radians()
    }

    fn geneva(phi0: f64) -> Baseline {
        let a = Station::new("Bellevue", dm(46.0, 15.0), dm(6.0, 9.0)).unwrap();
        let b = Station::new("Bernex", dm(46.0, 10.0), dm(6.0, 5.0)).unwrap();
        Baseline::new(a, b, 10_600.0, phi0).unwrap()
    }

    #[test]
    fn geneva_colatitudes_and_offset() {
        let g = geneva(2.247);
        assert_relative_eq!(g.a().colatitude(), dm(43.0, 45.0), epsilon = 1e-12);
        assert_relative_eq!(g.b().colatitude(), dm(43.0, 50.0), epsilon = 1e-12);
        assert_relative_eq!(g.longitude_offset(), -dm(0.0, 4.0), epsilon = 1e-12);
        assert_relative_eq!(g.phi0(), 2.247, epsilon = 1e-15);
    }

    #[test]
    fn fixture_sidereal_phase() {
        let g = geneva(0.0);
        let start: DateTime<Utc> = "1999-06-01T15:30:00Z".parse().unwrap();
        let phi0 = vernal_hour_angle(g.a(), &start);
        assert!((phi0 - 2.247).abs() < 0.01, "phi0 = {phi0}");
        // oracle script value
        assert_relative_eq!(phi0, 2.239_708_114, epsilon = 1e-8);
    }

    #[test]
    fn sidereal_phase_shifts_with_longitude_and_repeats() {
        let start: DateTime<Utc> = "1999-06-01T15:30:00Z".parse().unwrap();
        let a = Station::new("a", 0.8, 0.1).unwrap();
        let opposite = Station::new("b", 0.8, 0.1 + PI).unwrap();
        let d = wrap_two_pi(vernal_hour_angle(&opposite, &start) - vernal_hour_angle(&a, &start) - PI);
        assert!(d < 1e-12 || TAU - d < 1e-12);
        let later = from_unix_seconds(unix_seconds(&start) + 86_164.090_5).unwrap();
        let diff = crate::celestial::wrap_pi(vernal_hour_angle(&a, &later) - vernal_hour_angle(&a, &start));
        assert!(diff.abs() < 1e-4, "{diff}");
    }

    #[test]
    fn polar_baseline_points_along_axis() {
        let a = Station::new("north", 0.3, 1.0).unwrap();
        let b = Station::new("south", -0.3, 1.0).unwrap();
        let base = Baseline::new(a, b, 1000.0, 0.7).unwrap();
        let e = base.unit_baseline(1234.0, &OrbitalConstants::default());
        assert!(e.x.abs() < 1e-12 && e.y.abs() < 1e-12);
        assert_relative_eq!(e.z, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn coincident_stations_are_degenerate() {
        let a = Station::new("x", 0.5, 0.2).unwrap();
        let b = Station::new("y", 0.5, 0.2 + TAU).unwrap();
        assert!(matches!(
            Baseline::new(a.clone(), b, 10.0, 0.0),
            Err(Error::DegenerateBaseline(..))
        ));
        let p1 = Station::new("pole", FRAC_PI_2, 0.0).unwrap();
        let p2 = Station::new("pole2", FRAC_PI_2, 2.0).unwrap();
        assert!(Baseline::new(p1, p2, 10.0, 0.0).is_err());
        assert!(Baseline::new(a.clone(), a, 10.0, 0.0).is_err());
    }

    #[test]
    fn orthogonal_velocity_projects_to_zero() {
        let g = geneva(2.247);
        let consts = OrbitalConstants::default();
        let e = g.unit_baseline(0.0, &consts);
        let ortho = e.cross(&Vector3::z()).normalize() * 3.0e5;
        let v = FrameVelocity::new(ortho, "v").unwrap();
        assert!(g.beta_x(0.0, &v, &consts).abs() < 1e-18);
    }

    #[test]
    fn geneva_beta_is_bounded_by_frame_speed() {
        let g = geneva(2.247);
        let consts = OrbitalConstants::default();
        let dir = EquatorialDirection::from_hours_degrees(11.2, -7.22).unwrap();
        let v = crate::celestial::sun_frame_velocity(&dir, 371e3).unwrap();
        for k in 0..=1000 {
            let t = f64::from(k) * 86.4;
            assert!(g.beta_x(t, &v, &consts).abs() <= 371e3 / SPEED_OF_LIGHT);
        }
    }

    proptest! {
        #[test]
        fn unit_norm(t in -1e7..1e7f64, phi0 in 0.0..TAU) {
            let e = geneva(phi0).unit_baseline(t, &OrbitalConstants::default());
            prop_assert!((e.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn sidereal_periodicity(t in 0.0..1e6f64) {
            let consts = OrbitalConstants::default();
            let g = geneva(2.247);
            let e0 = g.unit_baseline(t, &consts);
            let e1 = g.unit_baseline(t + consts.sidereal_day, &consts);
            prop_assert!((e0 - e1).amax() < 1e-9);
        }

        #[test]
        fn swap_negates_exactly(t in -1e6..1e6f64, phi0 in 0.0..TAU) {
            let consts = OrbitalConstants::default();
            let g = geneva(phi0);
            prop_assert_eq!(g.swapped().unit_baseline(t, &consts), -g.unit_baseline(t, &consts));
        }

        #[test]
        fn polar_component_is_constant(t in -1e6..1e6f64) {
            let consts = OrbitalConstants::default();
            let g = geneva(2.247);
            let z0 = g.unit_baseline(0.0, &consts).z;
            prop_assert!((g.unit_baseline(t, &consts).z - z0).abs() < 1e-12);
        }

        #[test]
        fn projection_is_bounded(t in -1e6..1e6f64, x in -1e6..1e6f64, y in -1e6..1e6f64, z in -1e6..1e6f64) {
            let v = FrameVelocity::new(Vector3::new(x, y, z), "v").unwrap();
            let beta = geneva(1.0).beta_x(t, &v, &OrbitalConstants::default());
            prop_assert!(beta.abs() <= v.magnitude() / SPEED_OF_LIGHT * (1.0 + 1e-12));
        }
    }
}
