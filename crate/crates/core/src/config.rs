//! Config files: a flat, sectioned `key = value` document in which every
//! quantity carries its unit.
//!
//! ```text
//! [experiment]
//! start = 1999-06-01T15:30:00Z
//! end = 1999-06-02T06:30:00Z
//! fringe_period = 1 h
//!
//! [station_a]
//! name = Bellevue
//! latitude = 46d15m N
//! longitude = 6d09m E
//! ```
//!
//! `#` starts a comment. Keys are unique within a section and unknown
//! keys are rejected. Errors name the offending `section.key`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::{DateTime, SecondsFormat, Utc};
use thiserror::Error;

use crate::baseline::Station;
use crate::celestial::{EquatorialDirection, OrbitalConstants};
use crate::error::Error as DomainError;
use crate::fringe::{FringeModel, InfluenceSpeed};
use crate::record::{ExperimentRecord, FrameSpec, RecordSpec};
use crate::units::{self, format_f64, UnitError};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{path}: {message}")]
pub struct ConfigError {
    /// `section.key`, `section`, or `line N`.
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

const SCHEMA: &[(&str, &[&str])] = &[
    ("experiment", &["name", "start", "end", "fringe_period", "theta0"]),
    ("station_a", &["name", "latitude", "longitude"]),
    ("station_b", &["name", "latitude", "longitude"]),
    ("baseline", &["distance", "phi0"]),
    (
        "alignment",
        &["c_tau_start", "c_tau_end", "tau_start", "tau_end", "localization"],
    ),
    ("frame", &["preset", "name", "speed", "right_ascension", "declination"]),
    (
        "constants",
        &[
            "tropical_year",
            "sidereal_day",
            "ecliptic_inclination",
            "earth_sun_distance",
            "earth_radius",
        ],
    ),
    ("scan", &["speeds", "declination_bands", "right_ascension_bands", "directions"]),
    (
        "plan",
        &["distance", "achievable_alignment", "localization", "fringe_period", "frame_speed"],
    ),
    (
        "simulate",
        &[
            "base_rate",
            "visibility",
            "bin_width",
            "phase",
            "collapsed_visibility",
            "hypothesis_speed",
            "seed",
        ],
    ),
];

/// Parsed but uninterpreted document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Self::default();
        let mut current: Option<String> = None;
        for (n, raw) in text.lines().enumerate() {
            let line_path = || format!("line {}", n + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::new(line_path(), "unterminated section header"))?
                    .trim();
                let Some((_, keys)) = SCHEMA.iter().find(|(s, _)| *s == name) else {
                    return Err(ConfigError::new(line_path(), format!("unknown section [{name}]")));
                };
                let _ = keys;
                if doc.sections.contains_key(name) {
                    return Err(ConfigError::new(name, "section appears twice"));
                }
                doc.sections.insert(name.to_string(), BTreeMap::new());
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::new(line_path(), "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(section) = current.as_deref() else {
                return Err(ConfigError::new(line_path(), "key outside of any section"));
            };
            let path = format!("{section}.{key}");
            let allowed = SCHEMA
                .iter()
                .find(|(s, _)| *s == section)
                .map(|(_, k)| *k)
                .unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(ConfigError::new(path, "unknown key"));
            }
            if value.is_empty() {
                return Err(ConfigError::new(path, "empty value"));
            }
            let entries = doc.sections.get_mut(section).expect("section registered");
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ConfigError::new(path, "duplicate key"));
            }
        }
        Ok(doc)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    fn require(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key)
            .ok_or_else(|| ConfigError::new(format!("{section}.{key}"), "missing required field"))
    }

    fn typed<T>(&self, section: &str, key: &str, f: impl Fn(&str) -> std::result::Result<T, UnitError>) -> Result<Option<T>> {
        self.get(section, key)
            .map(|v| f(v).map_err(|e| ConfigError::new(format!("{section}.{key}"), e.to_string())))
            .transpose()
    }

    fn required<T>(&self, section: &str, key: &str, f: impl Fn(&str) -> std::result::Result<T, UnitError>) -> Result<T> {
        self.require(section, key)?;
        Ok(self.typed(section, key, f)?.expect("present"))
    }
}

fn parse_instant(text: &str) -> std::result::Result<DateTime<Utc>, UnitError> {
    text.parse::<DateTime<Utc>>().map_err(|_| UnitError {
        input: text.into(),
        expected: "an ISO-8601 UTC instant (e.g. 1999-06-01T15:30:00Z)",
    })
}

fn parse_count(text: &str) -> std::result::Result<usize, UnitError> {
    text.trim().parse().map_err(|_| UnitError {
        input: text.into(),
        expected: "a non-negative integer",
    })
}

fn parse_seed(text: &str) -> std::result::Result<u64, UnitError> {
    text.trim().parse().map_err(|_| UnitError {
        input: text.into(),
        expected: "an unsigned 64-bit integer",
    })
}

fn check(path: &str, ok: bool, message: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::new(path, message))
    }
}

fn positive(path: &str, v: f64) -> Result<f64> {
    check(path, v.is_finite() && v > 0.0, format!("must be positive, got {v}"))?;
    Ok(v)
}

fn station(doc: &Document, section: &str) -> Result<Station> {
    let name = doc.require(section, "name")?.to_string();
    let latitude = doc.required(section, "latitude", units::parse_latitude)?;
    check(
        &format!("{section}.latitude"),
        latitude.abs() <= std::f64::consts::FRAC_PI_2,
        format!("{:.6} deg is outside [-90, 90]", latitude.to_degrees()),
    )?;
    let longitude = doc.required(section, "longitude", units::parse_longitude)?;
    Station::new(name, latitude, longitude).map_err(|e| ConfigError::new(section, e.to_string()))
}

fn offset(doc: &Document, which: &str) -> Result<f64> {
    let c_key = format!("c_tau_{which}");
    let t_key = format!("tau_{which}");
    match (
        doc.typed("alignment", &c_key, units::parse_length)?,
        doc.typed("alignment", &t_key, units::parse_duration)?,
    ) {
        (Some(_), Some(_)) => Err(ConfigError::new(
            format!("alignment.{t_key}"),
            format!("give either {c_key} or {t_key}, not both"),
        )),
        (Some(length), None) => Ok(length / SPEED_OF_LIGHT),
        (None, Some(tau)) => Ok(tau),
        (None, None) => Err(ConfigError::new(format!("alignment.{c_key}"), "missing required field")),
    }
}

fn frame(doc: &Document) -> Result<FrameSpec> {
    let explicit = ["name", "speed", "right_ascension", "declination"]
        .iter()
        .any(|k| doc.get("frame", k).is_some());
    match doc.get("frame", "preset") {
        Some(_) if explicit => Err(ConfigError::new(
            "frame.preset",
            "preset cannot be combined with an explicit frame",
        )),
        Some("cmb") => Ok(FrameSpec::cmb()),
        Some("lab") => Ok(FrameSpec::Lab),
        Some(other) => Err(ConfigError::new(
            "frame.preset",
            format!("unknown preset `{other}` (expected cmb or lab)"),
        )),
        None if !explicit => Ok(FrameSpec::cmb()),
        None => {
            let name = doc.get("frame", "name").unwrap_or("custom").to_string();
            let speed = doc.required("frame", "speed", units::parse_speed)?;
            check(
                "frame.speed",
                speed.is_finite() && speed >= 0.0 && speed < SPEED_OF_LIGHT,
                "must lie in [0, c)",
            )?;
            let ra = doc.required("frame", "right_ascension", units::parse_right_ascension)?;
            let dec = doc.required("frame", "declination", units::parse_angle)?;
            let direction = EquatorialDirection::new(ra, dec)
                .map_err(|e| ConfigError::new("frame.declination", e.to_string()))?;
            Ok(FrameSpec::Moving { name, speed, direction })
        }
    }
}

fn constants(doc: &Document) -> Result<OrbitalConstants> {
    let mut c = OrbitalConstants::default();
    let fields: [(&str, &mut f64, fn(&str) -> std::result::Result<f64, UnitError>); 5] = [
        ("tropical_year", &mut c.tropical_year, units::parse_duration),
        ("sidereal_day", &mut c.sidereal_day, units::parse_duration),
        ("ecliptic_inclination", &mut c.ecliptic_inclination, units::parse_angle),
        ("earth_sun_distance", &mut c.earth_sun_distance, units::parse_length),
        ("earth_radius", &mut c.earth_radius, units::parse_length),
    ];
    for (key, slot, parse) in fields {
        if let Some(v) = doc.typed("constants", key, parse)? {
            *slot = positive(&format!("constants.{key}"), v)?;
        }
    }
    Ok(c)
}

fn domain_path(e: &DomainError) -> &'static str {
    match e {
        DomainError::DegenerateBaseline(..) => "station_b",
        DomainError::EpochOutOfRange(_) => "experiment.start",
        DomainError::InvalidSpeed { .. } => "frame.speed",
        _ => "experiment",
    }
}

/// Interprets the record sections of a parsed document.
pub fn record_from_document(doc: &Document) -> Result<ExperimentRecord> {
    let start = doc.required("experiment", "start", parse_instant)?;
    let end = doc.required("experiment", "end", parse_instant)?;
    check("experiment.end", end > start, "must be after experiment.start")?;
    let fringe_period = positive(
        "experiment.fringe_period",
        doc.required("experiment", "fringe_period", units::parse_duration)?,
    )?;
    let d_ab = positive("baseline.distance", doc.required("baseline", "distance", units::parse_length)?)?;
    let localization = positive(
        "alignment.localization",
        doc.required("alignment", "localization", units::parse_duration)?,
    )?;
    let spec = RecordSpec {
        name: doc.get("experiment", "name").map(str::to_string),
        station_a: station(doc, "station_a")?,
        station_b: station(doc, "station_b")?,
        d_ab,
        start,
        end,
        tau_start: offset(doc, "start")?,
        tau_end: offset(doc, "end")?,
        localization,
        fringe_period,
        frame: frame(doc)?,
        constants: constants(doc)?,
        theta0: doc.typed("experiment", "theta0", units::parse_angle)?,
        phi0: doc.typed("baseline", "phi0", units::parse_angle)?,
    };
    ExperimentRecord::new(spec).map_err(|e| ConfigError::new(domain_path(&e), e.to_string()))
}

/// Parses a config document into a validated experiment record.
pub fn parse_config(text: &str) -> Result<ExperimentRecord> {
    record_from_document(&Document::parse(text)?)
}

fn instant(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

/// Canonical SI rendering of a record; [`parse_config`] reads it back to an
/// identical record.
pub fn serialize_record(record: &ExperimentRecord) -> String {
    let s = record.spec();
    let mut out = String::new();
    let f = format_f64;
    let _ = writeln!(out, "[experiment]");
    if let Some(name) = &s.name {
        let _ = writeln!(out, "name = {name}");
    }
    let _ = writeln!(out, "start = {}", instant(&s.start));
    let _ = writeln!(out, "end = {}", instant(&s.end));
    let _ = writeln!(out, "fringe_period = {} s", f(s.fringe_period));
    if let Some(theta0) = s.theta0 {
        let _ = writeln!(out, "theta0 = {} rad", f(theta0));
    }
    for (section, st) in [("station_a", &s.station_a), ("station_b", &s.station_b)] {
        let _ = writeln!(out, "\n[{section}]");
        let _ = writeln!(out, "name = {}", st.name());
        let _ = writeln!(out, "latitude = {} rad", f(st.latitude()));
        let _ = writeln!(out, "longitude = {} rad", f(st.longitude()));
    }
    let _ = writeln!(out, "\n[baseline]");
    let _ = writeln!(out, "distance = {} m", f(s.d_ab));
    if let Some(phi0) = s.phi0 {
        let _ = writeln!(out, "phi0 = {} rad", f(phi0));
    }
    let _ = writeln!(out, "\n[alignment]");
    let _ = writeln!(out, "tau_start = {} s", f(s.tau_start));
    let _ = writeln!(out, "tau_end = {} s", f(s.tau_end));
    let _ = writeln!(out, "localization = {} s", f(s.localization));
    let _ = writeln!(out, "\n[frame]");
    match &s.frame {
        FrameSpec::Lab => {
            let _ = writeln!(out, "preset = lab");
        }
        FrameSpec::Moving { name, speed, direction } => {
            let _ = writeln!(out, "name = {name}");
            let _ = writeln!(out, "speed = {} m/s", f(*speed));
            let _ = writeln!(out, "right_ascension = {} rad", f(direction.right_ascension()));
            let _ = writeln!(out, "declination = {} rad", f(direction.declination()));
        }
    }
    let c = &s.constants;
    let _ = writeln!(out, "\n[constants]");
    let _ = writeln!(out, "tropical_year = {} s", f(c.tropical_year));
    let _ = writeln!(out, "sidereal_day = {} s", f(c.sidereal_day));
    let _ = writeln!(out, "ecliptic_inclination = {} rad", f(c.ecliptic_inclination));
    let _ = writeln!(out, "earth_sun_distance = {} m", f(c.earth_sun_distance));
    let _ = writeln!(out, "earth_radius = {} m", f(c.earth_radius));
    out
}

/// `[scan]` section.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub speeds: Vec<f64>,
    pub declination_bands: usize,
    pub right_ascension_bands: usize,
    /// Explicit directions; replaces the lattice when present.
    pub directions: Option<Vec<EquatorialDirection>>,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            speeds: vec![FrameSpec::CMB_SPEED],
            declination_bands: 12,
            right_ascension_bands: 24,
            directions: None,
        }
    }
}

fn list<T>(path: &str, text: &str, sep: char, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<&str> = text.split(sep).map(str::trim).filter(|s| !s.is_empty()).collect();
    check(path, !items.is_empty(), "empty list")?;
    items.into_iter().map(f).collect()
}

pub fn scan_spec(doc: &Document) -> Result<ScanSpec> {
    let mut spec = ScanSpec::default();
    if let Some(text) = doc.get("scan", "speeds") {
        spec.speeds = list("scan.speeds", text, ',', |s| {
            units::parse_speed(s).map_err(|e| ConfigError::new("scan.speeds", e.to_string()))
        })?;
    }
    if let Some(n) = doc.typed("scan", "declination_bands", parse_count)? {
        check("scan.declination_bands", n > 0, "must be at least 1")?;
        spec.declination_bands = n;
    }
    if let Some(n) = doc.typed("scan", "right_ascension_bands", parse_count)? {
        check("scan.right_ascension_bands", n > 0, "must be at least 1")?;
        spec.right_ascension_bands = n;
    }
    if let Some(text) = doc.get("scan", "directions") {
        let path = "scan.directions";
        spec.directions = Some(list(path, text, ';', |item| {
            let (ra, dec) = item
                .split_once('/')
                .ok_or_else(|| ConfigError::new(path, format!("`{item}` is not `ra / dec`")))?;
            let ra = units::parse_right_ascension(ra).map_err(|e| ConfigError::new(path, e.to_string()))?;
            let dec = units::parse_angle(dec).map_err(|e| ConfigError::new(path, e.to_string()))?;
            EquatorialDirection::new(ra, dec).map_err(|e| ConfigError::new(path, e.to_string()))
        })?);
    }
    Ok(spec)
}

/// Optional overrides from `[plan]`; missing values come from the record.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlanOverrides {
    pub distance: Option<f64>,
    pub achievable_alignment: Option<f64>,
    pub localization: Option<f64>,
    pub fringe_period: Option<f64>,
    pub frame_speed: Option<f64>,
}

pub fn plan_overrides(doc: &Document) -> Result<PlanOverrides> {
    Ok(PlanOverrides {
        distance: doc.typed("plan", "distance", units::parse_length)?,
        achievable_alignment: doc.typed("plan", "achievable_alignment", units::parse_length)?,
        localization: doc.typed("plan", "localization", units::parse_duration)?,
        fringe_period: doc.typed("plan", "fringe_period", units::parse_duration)?,
        frame_speed: doc.typed("plan", "frame_speed", units::parse_speed)?,
    })
}

/// `[simulate]` section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulateSpec {
    pub model: FringeModel,
    pub hypothesis_speed: InfluenceSpeed,
    pub seed: Option<u64>,
}

fn parse_influence(text: &str) -> std::result::Result<InfluenceSpeed, UnitError> {
    if text.trim() == "unbounded" {
        return Ok(InfluenceSpeed::Unbounded);
    }
    units::parse_speed(text)
        .map(InfluenceSpeed::Finite)
        .map_err(|_| UnitError {
            input: text.into(),
            expected: "a speed (e.g. `1e4 c`) or `unbounded`",
        })
}

/// Reads `[simulate]`, defaulting to 10 /s, V = 0.9, 50 s bins, zero phase,
/// and the record's fringe period.
pub fn simulate_spec(doc: &Document, record: &ExperimentRecord) -> Result<SimulateSpec> {
    let model = FringeModel {
        base_rate: doc.typed("simulate", "base_rate", units::parse_rate)?.unwrap_or(10.0),
        visibility: doc.typed("simulate", "visibility", units::parse_number)?.unwrap_or(0.9),
        fringe_period: record.fringe_period(),
        bin_width: doc.typed("simulate", "bin_width", units::parse_duration)?.unwrap_or(50.0),
        phase_at_t0: doc.typed("simulate", "phase", units::parse_angle)?.unwrap_or(0.0),
        collapsed_visibility: doc
            .typed("simulate", "collapsed_visibility", units::parse_number)?
            .unwrap_or(0.0),
    };
    model
        .validate()
        .map_err(|e| ConfigError::new("simulate", e.to_string()))?;
    let hypothesis_speed = doc
        .typed("simulate", "hypothesis_speed", parse_influence)?
        .unwrap_or(InfluenceSpeed::Unbounded);
    if let InfluenceSpeed::Finite(v) = hypothesis_speed {
        check("simulate.hypothesis_speed", v > SPEED_OF_LIGHT, "must exceed c")?;
    }
    Ok(SimulateSpec {
        model,
        hypothesis_speed,
        seed: doc.typed("simulate", "seed", parse_seed)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const GENEVA: &str = include_str!("../fixtures/geneva_1999.cfg");

    #[test]
    fn geneva_fixture() {
        let rec = parse_config(GENEVA).unwrap();
        let s = rec.spec();
        assert_eq!(s.d_ab, 10_600.0);
        assert_relative_eq!(s.tau_start, 6.671_281_903_963_041e-12, max_relative = 1e-15);
        assert_relative_eq!(s.tau_end * SPEED_OF_LIGHT, 0.014, max_relative = 1e-15);
        assert_relative_eq!(s.localization, 90e-12);
        assert_eq!(s.fringe_period, 3600.0);
        assert_eq!(s.frame, FrameSpec::cmb());
        assert_eq!(s.station_a.name(), "Bellevue");
        assert_relative_eq!(s.station_b.latitude().to_degrees(), 46.0 + 10.0 / 60.0, epsilon = 1e-12);
    }

    #[test]
    fn two_millimetres_is_picoseconds() {
        let rec = parse_config(GENEVA).unwrap();
        assert!((rec.spec().tau_start - 6.67e-12).abs() < 0.01e-12);
    }

    #[test]
    fn round_trip() {
        let rec = parse_config(GENEVA).unwrap();
        let text = serialize_record(&rec);
        assert_eq!(parse_config(&text).unwrap(), rec);
        let mut spec = rec.spec().clone();
        spec.theta0 = Some(1.24);
        spec.phi0 = Some(2.247);
        spec.frame = FrameSpec::Lab;
        let rec2 = ExperimentRecord::new(spec).unwrap();
        assert_eq!(parse_config(&serialize_record(&rec2)).unwrap(), rec2);
    }

    fn with(line_from: &str, line_to: &str) -> String {
        assert!(GENEVA.contains(line_from), "{line_from}");
        GENEVA.replacen(line_from, line_to, 1)
    }

    #[test]
    fn latitude_out_of_range() {
        let err = parse_config(&with("latitude = 46d15m N", "latitude = 91d N")).unwrap_err();
        assert_eq!(err.path, "station_a.latitude");
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (with("distance = 10.6 km", "distance = 10.6 parsecs"), "baseline.distance"),
            (with("distance = 10.6 km", "distance = -1 km"), "baseline.distance"),
            (with("localization = 90 ps", ""), "alignment.localization"),
            (with("fringe_period = 1 h", "fringe_period = 0 s"), "experiment.fringe_period"),
            (with("end = 1999-06-02T06:30:00Z", "end = 1999-05-02T06:30:00Z"), "experiment.end"),
            (with("start = 1999-06-01T15:30:00Z", "start = yesterday"), "experiment.start"),
            (with("c_tau_start = 2 mm", "c_tau_start = 2 mm\ntau_start = 1 ps"), "alignment.tau_start"),
            (with("preset = cmb", "preset = aether"), "frame.preset"),
            (format!("{GENEVA}\n[baseline]\n"), "baseline"),
            (with("[constants]", "[constants]\nwarp = 9"), "constants.warp"),
        ];
        for (text, path) in cases {
            let err = parse_config(&text).unwrap_err();
            assert_eq!(err.path, path, "{err}");
        }
    }

    #[test]
    fn structural_errors() {
        assert!(Document::parse("key = 1").is_err());
        assert!(Document::parse("[nowhere]").is_err());
        assert!(Document::parse("[experiment\nstart = x").is_err());
        assert!(Document::parse("[experiment]\njunk").is_err());
        assert!(Document::parse("[experiment]\nname = a\nname = b").is_err());
    }

    #[test]
    fn explicit_frame() {
        let text = with(
            "preset = cmb",
            "name = dipole\nspeed = 371 km/s\nright_ascension = 11.20 h\ndeclination = -7.22 deg",
        );
        let rec = parse_config(&text).unwrap();
        let FrameSpec::Moving { speed, direction, .. } = rec.frame() else { panic!() };
        assert_eq!(*speed, 371e3);
        let FrameSpec::Moving { direction: cmb, .. } = FrameSpec::cmb() else { panic!() };
        assert_eq!(*direction, cmb);
    }

    #[test]
    fn scan_section() {
        let text = format!(
            "{GENEVA}\n[scan]\nspeeds = 100 km/s, 371 km/s\ndeclination_bands = 3\nright_ascension_bands = 4\ndirections = 11.20 h / -7.22 deg; 0 deg / 90 deg\n"
        );
        let doc = Document::parse(&text).unwrap();
        let spec = scan_spec(&doc).unwrap();
        assert_eq!(spec.speeds, vec![1e5, 3.71e5]);
        assert_eq!(spec.declination_bands, 3);
        assert_eq!(spec.directions.unwrap().len(), 2);
        let bad = Document::parse(&format!("{GENEVA}\n[scan]\ndirections = 11 h\n")).unwrap();
        assert_eq!(scan_spec(&bad).unwrap_err().path, "scan.directions");
    }

    #[test]
    fn simulate_section() {
        let text = format!("{GENEVA}\n[simulate]\nhypothesis_speed = 1e4 c\nseed = 42\nbase_rate = 20 /s\n");
        let doc = Document::parse(&text).unwrap();
        let rec = record_from_document(&doc).unwrap();
        let spec = simulate_spec(&doc, &rec).unwrap();
        assert_eq!(spec.seed, Some(42));
        assert_eq!(spec.model.base_rate, 20.0);
        assert_eq!(spec.hypothesis_speed, InfluenceSpeed::Finite(1e4 * SPEED_OF_LIGHT));
        let slow = Document::parse(&format!("{GENEVA}\n[simulate]\nhypothesis_speed = 0.5 c\n")).unwrap();
        assert_eq!(
            simulate_spec(&slow, &rec).unwrap_err().path,
            "simulate.hypothesis_speed"
        );
    }
}
