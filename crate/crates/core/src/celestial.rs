//! Velocities of the laboratory relative to a candidate frame.
//!
//! Everything is expressed in the fixed equatorial system: `z` along the
//! Earth's rotation axis (north), `x` towards the vernal point, `y`
//! completing a right-handed triad. Speeds are small compared to `c`, so
//! contributions are added componentwise.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use chrono::{DateTime, TimeZone, Utc};
use nalgebra::Vector3;

use crate::error::{invalid, Error, Result};
use crate::SPEED_OF_LIGHT;

/// Largest part admitted by [`compose_galilean`].
pub const GALILEAN_LIMIT: f64 = 0.01 * SPEED_OF_LIGHT;

/// A direction on the celestial sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquatorialDirection {
    right_ascension: f64,
    declination: f64,
}

impl EquatorialDirection {
    /// Right ascension is wrapped into `[0, 2π)`; declination must lie in
    /// `[-π/2, π/2]`.
    pub fn new(right_ascension: f64, declination: f64) -> Result<Self> {
        if !right_ascension.is_finite() {
            return Err(Error::InvalidAngle {
                what: "right ascension",
                value: right_ascension,
            });
        }
        if !declination.is_finite() || declination.abs() > FRAC_PI_2 {
            return Err(Error::InvalidAngle {
                what: "declination",
                value: declination,
            });
        }
        let mut ra = right_ascension.rem_euclid(TAU);
        if ra >= TAU {
            ra = 0.0;
        }
        Ok(Self {
            right_ascension: ra,
            declination,
        })
    }

    pub fn from_hours_degrees(ra_hours: f64, dec_degrees: f64) -> Result<Self> {
        Self::new(
            crate::units::hours_to_radians(ra_hours),
            dec_degrees.to_radians(),
        )
    }

    pub fn right_ascension(&self) -> f64 {
        self.right_ascension
    }

    pub fn declination(&self) -> f64 {
        self.declination
    }

    /// Azimuth `φ = α` and polar angle `θ = π/2 − δ`.
    pub fn polar_angles(&self) -> (f64, f64) {
        (self.right_ascension, FRAC_PI_2 - self.declination)
    }

    pub fn unit_vector(&self) -> Vector3<f64> {
        let (phi, theta) = self.polar_angles();
        Vector3::new(
            phi.cos() * theta.sin(),
            phi.sin() * theta.sin(),
            theta.cos(),
        )
    }
}

/// A velocity in the equatorial system, tagged with what moves relative to
/// what.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameVelocity {
    velocity: Vector3<f64>,
    label: String,
}

impl FrameVelocity {
    pub fn new(velocity: Vector3<f64>, label: impl Into<String>) -> Result<Self> {
        let magnitude = velocity.norm();
        if !velocity.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidSpeed {
                value: magnitude,
                reason: "non-finite component",
            });
        }
        if magnitude >= SPEED_OF_LIGHT {
            return Err(Error::InvalidSpeed {
                value: magnitude,
                reason: "not below c",
            });
        }
        Ok(Self {
            velocity,
            label: label.into(),
        })
    }

    pub fn zero(label: impl Into<String>) -> Self {
        Self {
            velocity: Vector3::zeros(),
            label: label.into(),
        }
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.velocity
    }

    pub fn magnitude(&self) -> f64 {
        self.velocity.norm()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Physical constants of the Earth's motion. Overridable from config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitalConstants {
    /// Tropical year (s).
    pub tropical_year: f64,
    /// Rotation period of the Earth relative to the stars (s).
    pub sidereal_day: f64,
    /// Inclination of the ecliptic on the equator (rad).
    pub ecliptic_inclination: f64,
    /// Mean Earth–Sun distance (m).
    pub earth_sun_distance: f64,
    /// Earth radius (m).
    pub earth_radius: f64,
}

impl Default for OrbitalConstants {
    fn default() -> Self {
        Self {
            tropical_year: 365.2422 * 86400.0,
            sidereal_day: 86164.1,
            ecliptic_inclination: 23.5f64.to_radians(),
            earth_sun_distance: 1.495_978_707e11,
            earth_radius: 6.371e6,
        }
    }
}

impl OrbitalConstants {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("tropical_year", self.tropical_year),
            ("sidereal_day", self.sidereal_day),
            ("ecliptic_inclination", self.ecliptic_inclination),
            ("earth_sun_distance", self.earth_sun_distance),
            ("earth_radius", self.earth_radius),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid("orbital constant", format!("{name} = {value} must be positive")));
            }
        }
        Ok(())
    }

    /// Orbital angular rate `2π / year` (rad/s).
    pub fn omega_y(&self) -> f64 {
        TAU / self.tropical_year
    }

    /// Rotation rate `2π / sidereal day` (rad/s).
    pub fn omega_d(&self) -> f64 {
        TAU / self.sidereal_day
    }
}

// Spring equinox of 2000, 2000-03-20T07:35:00Z.
const EQUINOX_ANCHOR_UNIX: i64 = 953_537_700;
const EQUINOX_ANCHOR_YEAR: i32 = 2000;
pub const EQUINOX_FIRST_YEAR: i32 = 1990;
pub const EQUINOX_LAST_YEAR: i32 = 2030;

/// Spring-equinox instants for 1990–2030 as Unix seconds.
///
/// Entries are spaced by exactly one tropical year from the 2000 equinox,
/// which keeps the orbital phase strictly periodic under the circular-orbit
/// model. They agree with the observed equinoxes to better than 20 minutes
/// over the whole range.
pub fn equinox_table(consts: &OrbitalConstants) -> Vec<(i32, f64)> {
    (EQUINOX_FIRST_YEAR..=EQUINOX_LAST_YEAR)
        .map(|year| {
            let k = f64::from(year - EQUINOX_ANCHOR_YEAR);
            (year, EQUINOX_ANCHOR_UNIX as f64 + k * consts.tropical_year)
        })
        .collect()
}

pub fn unix_seconds(t: &DateTime<Utc>) -> f64 {
    t.timestamp() as f64 + f64::from(t.timestamp_subsec_nanos()) * 1e-9
}

pub fn from_unix_seconds(seconds: f64) -> Option<DateTime<Utc>> {
    let whole = seconds.floor();
    let nanos = ((seconds - whole) * 1e9).round() as u32;
    let (whole, nanos) = if nanos >= 1_000_000_000 {
        (whole + 1.0, 0)
    } else {
        (whole, nanos)
    };
    if !(whole.is_finite() && whole.abs() < 1e15) {
        return None;
    }
    Utc.timestamp_opt(whole as i64, nanos).single()
}

/// Seconds elapsed from `from` to `to`.
pub fn seconds_between(from: &DateTime<Utc>, to: &DateTime<Utc>) -> f64 {
    let delta = *to - *from;
    match delta.num_nanoseconds() {
        Some(ns) => ns as f64 * 1e-9,
        None => delta.num_milliseconds() as f64 * 1e-3,
    }
}

/// An instant together with the time elapsed since the latest Spring
/// equinox.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epoch {
    utc: DateTime<Utc>,
    delta_t_equinox: f64,
}

impl Epoch {
    /// Looks up the most recent equinox in the built-in table.
    pub fn at(utc: DateTime<Utc>, consts: &OrbitalConstants) -> Result<Self> {
        let t = unix_seconds(&utc);
        let table = equinox_table(consts);
        let out_of_range = || Error::EpochOutOfRange(utc.to_rfc3339());
        let last = table.last().map(|&(_, e)| e).ok_or_else(out_of_range)?;
        if t >= last + consts.tropical_year {
            return Err(out_of_range());
        }
        let &(_, equinox) = table
            .iter()
            .rev()
            .find(|&&(_, e)| e <= t)
            .ok_or_else(out_of_range)?;
        Self::with_delta(utc, t - equinox, consts)
    }

    /// An epoch with an explicitly given orbital phase `θ_0 = ω_y·ΔT`.
    pub fn with_orbital_phase(utc: DateTime<Utc>, theta0: f64, consts: &OrbitalConstants) -> Result<Self> {
        if !theta0.is_finite() {
            return Err(Error::InvalidAngle {
                what: "orbital phase",
                value: theta0,
            });
        }
        Self::with_delta(utc, theta0.rem_euclid(TAU) / consts.omega_y(), consts)
    }

    fn with_delta(utc: DateTime<Utc>, delta_t_equinox: f64, consts: &OrbitalConstants) -> Result<Self> {
        if !(0.0..consts.tropical_year).contains(&delta_t_equinox) {
            return Err(invalid(
                "epoch",
                format!("time since equinox {delta_t_equinox} s outside [0, 1 year)"),
            ));
        }
        Ok(Self {
            utc,
            delta_t_equinox,
        })
    }

    pub fn utc(&self) -> DateTime<Utc> {
        self.utc
    }

    pub fn delta_t_equinox(&self) -> f64 {
        self.delta_t_equinox
    }

    /// `θ_0 = ω_y·ΔT`.
    pub fn orbital_phase(&self, consts: &OrbitalConstants) -> f64 {
        consts.omega_y() * self.delta_t_equinox
    }
}

/// Velocity of the Sun relative to a frame whose motion is seen from the
/// Sun along `direction` (the dipole apex) at `speed`.
pub fn sun_frame_velocity(direction: &EquatorialDirection, speed: f64) -> Result<FrameVelocity> {
    if !speed.is_finite() || speed < 0.0 {
        return Err(Error::InvalidSpeed {
            value: speed,
            reason: "must be finite and non-negative",
        });
    }
    if speed >= SPEED_OF_LIGHT {
        return Err(Error::InvalidSpeed {
            value: speed,
            reason: "not below c",
        });
    }
    FrameVelocity::new(direction.unit_vector() * speed, "Sun relative to frame")
}

/// Orbital velocity of the Earth around the Sun on a circular orbit, with
/// the intra-run phase advance neglected.
pub fn earth_sun_velocity(epoch: &Epoch, consts: &OrbitalConstants) -> FrameVelocity {
    let theta0 = epoch.orbital_phase(consts);
    let tilt = consts.ecliptic_inclination;
    let speed = consts.omega_y() * consts.earth_sun_distance;
    let v = Vector3::new(
        -theta0.sin(),
        theta0.cos() * tilt.cos(),
        -theta0.cos() * tilt.sin(),
    ) * speed;
    FrameVelocity {
        velocity: v,
        label: "Earth relative to Sun".into(),
    }
}

/// Eastward rotation velocity of a site at `latitude` whose meridian sits
/// at azimuth `phi` from the vernal point.
pub fn site_spin_velocity(latitude: f64, phi: f64, consts: &OrbitalConstants) -> Result<FrameVelocity> {
    if !latitude.is_finite() || latitude.abs() > FRAC_PI_2 {
        return Err(Error::InvalidAngle {
            what: "latitude",
            value: latitude,
        });
    }
    if !phi.is_finite() {
        return Err(Error::InvalidAngle {
            what: "site azimuth",
            value: phi,
        });
    }
    let speed = consts.omega_d() * consts.earth_radius * latitude.cos();
    Ok(FrameVelocity {
        velocity: Vector3::new(-phi.sin(), phi.cos(), 0.0) * speed,
        label: "site relative to Earth".into(),
    })
}

/// Galilean sum of velocity contributions. Refuses any part at or above
/// 0.01 c.
pub fn compose_galilean(parts: &[FrameVelocity]) -> Result<FrameVelocity> {
    let mut sum = Vector3::zeros();
    for part in parts {
        let magnitude = part.magnitude();
        if !(magnitude < GALILEAN_LIMIT) {
            return Err(Error::GalileanRegime {
                label: part.label.clone(),
                magnitude,
            });
        }
        sum += part.velocity;
    }
    let label = parts
        .iter()
        .map(|p| p.label.as_str())
        .collect::<Vec<_>>()
        .join(" + ");
    FrameVelocity::new(sum, label)
}

/// The inverse relation: if the lab moves at `v` relative to a frame, the
/// frame moves at `−v` relative to the lab.
pub fn frame_relative_to_lab(lab_relative_to_frame: &FrameVelocity) -> FrameVelocity {
    let label = match lab_relative_to_frame.label.split_once(" relative to ") {
        Some((a, b)) if !b.contains(" relative to ") => format!("{b} relative to {a}"),
        _ => format!("inverse of ({})", lab_relative_to_frame.label),
    };
    FrameVelocity {
        velocity: -lab_relative_to_frame.velocity,
        label,
    }
}

/// Normalizes an angle into `[0, 2π)`.
pub fn wrap_two_pi(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Normalizes an angle into `(-π, π]`.
pub fn wrap_pi(angle: f64) -> f64 {
    let a = wrap_two_pi(angle);
    if a > PI {
        a - TAU
    } else {
        a
    }
}
