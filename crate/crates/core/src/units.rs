//! Unit-suffixed quantity parsing.
//!
//! Every quantity read from a config file carries an explicit unit and is
//! converted to SI (m, s, m/s, rad, 1/s) here. Nothing downstream sees a
//! non-SI number.

use std::f64::consts::PI;

use thiserror::Error;

use crate::SPEED_OF_LIGHT;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{input}` as {expected}")]
pub struct UnitError {
    pub input: String,
    pub expected: &'static str,
}

fn fail<T>(input: &str, expected: &'static str) -> Result<T, UnitError> {
    Err(UnitError {
        input: input.to_string(),
        expected,
    })
}

/// Splits `text` into a leading floating-point literal and the trimmed unit
/// that follows it.
pub fn split_number(text: &str) -> Option<(f64, &str)> {
    let s = text.trim();
    let bytes = s.as_bytes();
    let mut i = 0;
    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
        i += 1;
    }
    let mantissa_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i == mantissa_start || (i == mantissa_start + 1 && bytes[mantissa_start] == b'.') {
        return None;
    }
    // exponent only if followed by digits
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        let digits = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j > digits {
            i = j;
        }
    }
    let value: f64 = s[..i].parse().ok()?;
    if !value.is_finite() {
        return None;
    }
    Some((value, s[i..].trim()))
}

fn scaled(text: &str, expected: &'static str, table: &[(&str, f64)]) -> Result<f64, UnitError> {
    let Some((value, unit)) = split_number(text) else {
        return fail(text, expected);
    };
    match table.iter().find(|(name, _)| *name == unit) {
        Some((_, factor)) => {
            let v = value * factor;
            if v.is_finite() {
                Ok(v)
            } else {
                fail(text, expected)
            }
        }
        None => fail(text, expected),
    }
}

const LENGTH: &[(&str, f64)] = &[
    ("m", 1.0),
    ("km", 1e3),
    ("cm", 1e-2),
    ("mm", 1e-3),
    ("um", 1e-6),
    ("µm", 1e-6),
    ("nm", 1e-9),
];

const DURATION: &[(&str, f64)] = &[
    ("s", 1.0),
    ("ms", 1e-3),
    ("us", 1e-6),
    ("µs", 1e-6),
    ("ns", 1e-9),
    ("ps", 1e-12),
    ("fs", 1e-15),
    ("min", 60.0),
    ("h", 3600.0),
    ("d", 86400.0),
    ("day", 86400.0),
    ("days", 86400.0),
];

const SPEED: &[(&str, f64)] = &[
    ("m/s", 1.0),
    ("km/s", 1e3),
    ("c", SPEED_OF_LIGHT),
];

const RATE: &[(&str, f64)] = &[("/s", 1.0), ("1/s", 1.0), ("Hz", 1.0), ("kHz", 1e3)];

const ANGLE: &[(&str, f64)] = &[
    ("rad", 1.0),
    ("mrad", 1e-3),
    ("deg", PI / 180.0),
    ("°", PI / 180.0),
    ("arcmin", PI / (180.0 * 60.0)),
    ("arcsec", PI / (180.0 * 3600.0)),
];

/// Length in metres, e.g. `10.6 km`, `2 mm`.
pub fn parse_length(text: &str) -> Result<f64, UnitError> {
    scaled(text, "a length (m, km, mm, ...)", LENGTH)
}

/// Duration in seconds, e.g. `90 ps`, `1 h`.
pub fn parse_duration(text: &str) -> Result<f64, UnitError> {
    scaled(text, "a duration (s, ps, h, d, ...)", DURATION)
}

/// Speed in m/s, e.g. `371 km/s`, `1e4 c`.
pub fn parse_speed(text: &str) -> Result<f64, UnitError> {
    scaled(text, "a speed (m/s, km/s, c)", SPEED)
}

/// Rate in 1/s, e.g. `10 /s`, `5 Hz`.
pub fn parse_rate(text: &str) -> Result<f64, UnitError> {
    scaled(text, "a rate (/s, Hz)", RATE)
}

/// Bare number with no unit.
pub fn parse_number(text: &str) -> Result<f64, UnitError> {
    match split_number(text) {
        Some((v, "")) => Ok(v),
        _ => fail(text, "a plain number"),
    }
}

/// Sexagesimal angle `46d15m30s` / `46°15′30″` in the given base unit
/// (degrees for `d`, hours for `h`). Returns the value in base units.
fn parse_sexagesimal(text: &str, lead: &[char]) -> Option<f64> {
    let s = text.trim();
    let (negative, mut rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let mut total = 0.0;
    let mut stage = 0;
    let mut any = false;
    let mut fractional = false;
    while !rest.trim_start().is_empty() {
        rest = rest.trim_start();
        let end = rest
            .find(|c: char| !(c.is_ascii_digit() || c == '.'))
            .unwrap_or(rest.len());
        if end == 0 {
            return None;
        }
        let value: f64 = rest[..end].parse().ok()?;
        let tail = &rest[end..];
        let mark = tail.chars().next()?;
        let next_stage = if lead.contains(&mark) {
            1
        } else if matches!(mark, 'm' | '′' | '\'') {
            2
        } else if matches!(mark, 's' | '″' | '"') {
            3
        } else {
            return None;
        };
        if next_stage <= stage {
            return None;
        }
        // only the last component may be fractional
        if fractional {
            return None;
        }
        fractional = value.fract() != 0.0;
        if next_stage > 1 && value >= 60.0 {
            return None;
        }
        total += value / 60f64.powi(next_stage - 1);
        stage = next_stage;
        any = true;
        rest = &tail[mark.len_utf8()..];
    }
    if !any {
        return None;
    }
    Some(if negative { -total } else { total })
}

/// Angle in radians: `0.5 rad`, `-7.22 deg`, `46d15m`, `0°04′`.
pub fn parse_angle(text: &str) -> Result<f64, UnitError> {
    const EXPECTED: &str = "an angle (rad, deg, or d/m/s sexagesimal)";
    if let Ok(v) = scaled(text, EXPECTED, ANGLE) {
        return Ok(v);
    }
    match parse_sexagesimal(text, &['d', '°']) {
        Some(deg) => Ok(deg.to_radians()),
        None => fail(text, EXPECTED),
    }
}

fn parse_hemisphere(
    text: &str,
    positive: char,
    negative: char,
    expected: &'static str,
) -> Result<f64, UnitError> {
    let s = text.trim();
    let last = s.chars().last();
    let (body, sign) = match last {
        Some(ch) if ch == positive => (&s[..s.len() - 1], 1.0),
        Some(ch) if ch == negative => (&s[..s.len() - 1], -1.0),
        _ => (s, 0.0),
    };
    let angle = match parse_angle(body) {
        Ok(a) => a,
        Err(_) => return fail(text, expected),
    };
    if sign == 0.0 {
        return Ok(angle);
    }
    if angle < 0.0 {
        // "-46d N" is ambiguous
        return fail(text, expected);
    }
    Ok(sign * angle)
}

/// Latitude in radians, north positive: `46d15m N`, `-33.9 deg`.
pub fn parse_latitude(text: &str) -> Result<f64, UnitError> {
    parse_hemisphere(text, 'N', 'S', "a latitude (e.g. `46d15m N`)")
}

/// Longitude in radians, east positive: `6d09m E`, `73.9 deg W`.
pub fn parse_longitude(text: &str) -> Result<f64, UnitError> {
    parse_hemisphere(text, 'E', 'W', "a longitude (e.g. `6d09m E`)")
}

/// Right ascension in radians. Accepts hours (`11.20 h`, `11h12m`) or any
/// angle form.
pub fn parse_right_ascension(text: &str) -> Result<f64, UnitError> {
    const EXPECTED: &str = "a right ascension (`11.20 h`, `11h12m`, or an angle)";
    if let Some((hours, "h")) = split_number(text) {
        return Ok(hours_to_radians(hours));
    }
    if let Some(hours) = parse_sexagesimal(text, &['h']) {
        return Ok(hours_to_radians(hours));
    }
    parse_angle(text).or_else(|_| fail(text, EXPECTED))
}

/// 1 h of right ascension = 15 degrees.
pub fn hours_to_radians(hours: f64) -> f64 {
    (hours * 15.0).to_radians()
}

/// Shortest round-trip decimal rendering of `v`.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lengths_and_durations() {
        assert_eq!(parse_length("10.6 km").unwrap(), 10600.0);
        assert_eq!(parse_length("2 mm").unwrap(), 0.002);
        assert_eq!(parse_length("2mm").unwrap(), 0.002);
        assert_relative_eq!(parse_duration("90 ps").unwrap(), 90e-12);
        assert_eq!(parse_duration("1 h").unwrap(), 3600.0);
        assert_eq!(parse_duration("365.2422 d").unwrap(), 365.2422 * 86400.0);
        assert!(parse_length("10.6").is_err());
        assert!(parse_length("10.6 furlongs").is_err());
        assert!(parse_length("km").is_err());
        assert!(parse_duration("1e999 s").is_err());
    }

    #[test]
    fn speeds() {
        assert_eq!(parse_speed("371 km/s").unwrap(), 371e3);
        assert_eq!(parse_speed("1e4 c").unwrap(), 1e4 * SPEED_OF_LIGHT);
        assert_eq!(parse_speed("-3 m/s").unwrap(), -3.0);
        assert!(parse_speed("3 mph").is_err());
    }

    #[test]
    fn sexagesimal_angles() {
        assert_relative_eq!(parse_angle("46d15m").unwrap(), 46.25f64.to_radians());
        assert_relative_eq!(parse_angle("46°15′").unwrap(), 46.25f64.to_radians());
        assert_relative_eq!(parse_angle("0d04m").unwrap(), (4.0f64 / 60.0).to_radians());
        assert_relative_eq!(
            parse_angle("-7d13m12s").unwrap(),
            -(7.0 + 13.0 / 60.0 + 12.0 / 3600.0f64).to_radians()
        );
        assert_relative_eq!(parse_angle("-7.22 deg").unwrap(), -7.22f64.to_radians());
        assert_eq!(parse_angle("0.5 rad").unwrap(), 0.5);
        // out-of-order or overflowing components
        assert!(parse_angle("15m46d").is_err());
        assert!(parse_angle("46d75m").is_err());
        assert!(parse_angle("46.5d15m").is_err());
        assert!(parse_angle("").is_err());
    }

    #[test]
    fn hemispheres() {
        assert_relative_eq!(parse_latitude("46d15m N").unwrap(), 46.25f64.to_radians());
        assert_relative_eq!(parse_latitude("33.9 deg S").unwrap(), -33.9f64.to_radians());
        assert_relative_eq!(parse_longitude("6d09m E").unwrap(), 6.15f64.to_radians());
        assert_relative_eq!(parse_longitude("73.9 deg W").unwrap(), -73.9f64.to_radians());
        assert!(parse_latitude("-46d N").is_err());
        assert!(parse_latitude("46d15m E").is_err());
    }

    #[test]
    fn right_ascension_forms() {
        let expected = 168f64.to_radians();
        assert_relative_eq!(parse_right_ascension("11.20 h").unwrap(), expected, epsilon = 1e-14);
        assert_relative_eq!(parse_right_ascension("11h12m").unwrap(), expected, epsilon = 1e-14);
        assert_relative_eq!(parse_right_ascension("168 deg").unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn format_round_trips() {
        for v in [0.0, 1.0, -2.5, 10600.0, 6.671281903963041e-12, 1e300, 0.1 + 0.2] {
            assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
