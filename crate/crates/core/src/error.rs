use thiserror::Error;

/// Errors raised by the numeric and domain layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid speed {value} m/s: {reason}")]
    InvalidSpeed { value: f64, reason: &'static str },

    #[error("velocity part `{label}` has magnitude {magnitude} m/s, outside the Galilean regime (< 0.01 c)")]
    GalileanRegime { label: String, magnitude: f64 },

    #[error("invalid angle {value} rad for {what}")]
    InvalidAngle { what: &'static str, value: f64 },

    #[error("epoch {0} is outside the built-in equinox table (1990-2030)")]
    EpochOutOfRange(String),

    #[error("degenerate baseline: stations `{0}` and `{1}` coincide")]
    DegenerateBaseline(String, String),

    #[error("events are not space-like separated: |r| = {0} >= 1")]
    NotSpaceLike(f64),

    #[error("half-fringe window of {window} s is longer than the series span of {span} s")]
    WindowTooLong { window: f64, span: f64 },

    #[error("too few bins: need at least one full fringe ({needed} s), got {got} s")]
    TooShort { needed: f64, got: f64 },

    #[error("invalid {what}: {reason}")]
    InvalidInput { what: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidInput {
        what,
        reason: reason.into(),
    }
}
