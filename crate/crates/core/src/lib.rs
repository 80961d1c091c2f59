//! Lower bounds on the speed of a hypothetical superluminal influence
//! linking the two detections of an EPR experiment, evaluated in a candidate
//! preferred frame (the CMB rest frame by default).

pub mod baseline;
pub mod bound;
pub mod celestial;
pub mod config;
pub mod error;
pub mod fringe;
pub mod io;
pub mod record;
pub mod runner;
pub mod scan;
pub mod units;

pub use error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
