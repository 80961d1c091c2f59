//! CSV output and input for series, scan grids and coincidence counts.

use std::io::{Read, Write};

use chrono::{DateTime, SecondsFormat, TimeDelta, Utc};
use thiserror::Error;

use crate::bound::{window_bound, Alignment, BoundSeries, QiSpeed};
use crate::fringe::CountBin;
use crate::scan::ScanResult;
use crate::units::format_f64;
use crate::SPEED_OF_LIGHT;

pub const SERIES_HEADER: [&str; 6] = ["t_utc", "t_rel_s", "r", "beta_x", "v_qi_min_over_c", "capped"];
pub const SCAN_HEADER: [&str; 8] = [
    "cell",
    "speed_m_s",
    "right_ascension_rad",
    "declination_rad",
    "alignment",
    "n_crossings",
    "bound_over_c",
    "error",
];
pub const COUNTS_HEADER: [&str; 2] = ["t_bin_start_utc", "counts"];

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("row {row}: {message}")]
    Schema { row: u64, message: String },
}

fn schema(row: u64, message: impl Into<String>) -> IoError {
    IoError::Schema {
        row,
        message: message.into(),
    }
}

fn instant(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

fn offset(start: DateTime<Utc>, seconds: f64) -> DateTime<Utc> {
    start + TimeDelta::nanoseconds((seconds * 1e9).round() as i64)
}

/// Signed `v_QI,min / c`, clamped to the ceiling; simultaneous samples
/// report the ceiling.
pub fn speed_over_c(v: QiSpeed, ceiling: f64) -> f64 {
    let magnitude = v.clamped(ceiling) / SPEED_OF_LIGHT;
    match v {
        QiSpeed::Finite(x) if x < 0.0 => -magnitude,
        _ => magnitude,
    }
}

pub fn write_series<W: Write>(out: W, series: &BoundSeries) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SERIES_HEADER)?;
    for s in &series.samples {
        w.write_record([
            instant(offset(series.start, s.t)),
            format_f64(s.t),
            format_f64(s.r),
            format_f64(s.beta_x),
            format_f64(speed_over_c(s.v_qi_min, series.ceiling)),
            u8::from(s.capped).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub t_utc: DateTime<Utc>,
    pub t_rel: f64,
    pub r: f64,
    pub beta_x: f64,
    pub v_over_c: f64,
    pub capped: bool,
}

fn header_check<R: Read>(r: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), IoError> {
    let got = r.headers()?;
    if got.iter().ne(expected.iter().copied()) {
        return Err(schema(
            1,
            format!("header `{}` differs from `{}`", got.iter().collect::<Vec<_>>().join(","), expected.join(",")),
        ));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, row: u64, i: usize, name: &str) -> Result<T, IoError> {
    let raw = rec.get(i).ok_or_else(|| schema(row, format!("missing {name}")))?;
    raw.trim()
        .parse()
        .map_err(|_| schema(row, format!("{name}: cannot parse `{raw}`")))
}

fn finite(row: u64, name: &str, v: f64) -> Result<f64, IoError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(schema(row, format!("{name} must be finite")))
    }
}

pub fn read_series<R: Read>(input: R) -> Result<Vec<SeriesRow>, IoError> {
    let mut r = csv::Reader::from_reader(input);
    header_check(&mut r, &SERIES_HEADER)?;
    let mut rows: Vec<SeriesRow> = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = k as u64 + 2;
        let capped = match rec.get(5).map(str::trim) {
            Some("0") => false,
            Some("1") => true,
            _ => return Err(schema(row, "capped must be 0 or 1")),
        };
        let t_rel = finite(row, "t_rel_s", field(&rec, row, 1, "t_rel_s")?)?;
        if rows.last().is_some_and(|p| !(p.t_rel < t_rel)) {
            return Err(schema(row, "t_rel_s must be strictly increasing"));
        }
        rows.push(SeriesRow {
            t_utc: field(&rec, row, 0, "t_utc")?,
            t_rel,
            r: finite(row, "r", field(&rec, row, 2, "r")?)?,
            beta_x: finite(row, "beta_x", field(&rec, row, 3, "beta_x")?)?,
            v_over_c: finite(row, "v_qi_min_over_c", field(&rec, row, 4, "v_qi_min_over_c")?)?,
            capped,
        });
    }
    Ok(rows)
}

/// Recomputes the half-fringe bound (in units of c) from series rows.
pub fn bound_from_rows(rows: &[SeriesRow], fringe_period: f64) -> crate::Result<f64> {
    let times: Vec<f64> = rows.iter().map(|r| r.t_rel).collect();
    let speeds: Vec<f64> = rows.iter().map(|r| r.v_over_c.abs()).collect();
    window_bound(&times, &speeds, f64::INFINITY, fringe_period)
}

fn alignment_label(a: Alignment) -> &'static str {
    match a {
        Alignment::Good => "good",
        Alignment::Bad { .. } => "bad",
    }
}

pub fn write_scan<W: Write>(out: W, result: &ScanResult) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCAN_HEADER)?;
    for row in &result.rows {
        let (alignment, crossings, bound, error) = match &row.outcome {
            Ok(o) => (
                alignment_label(o.alignment).to_string(),
                o.n_crossings.to_string(),
                format_f64(o.bound / SPEED_OF_LIGHT),
                String::new(),
            ),
            Err(e) => (String::new(), String::new(), String::new(), e.to_string()),
        };
        w.write_record([
            row.cell.to_string(),
            format_f64(row.speed),
            format_f64(row.direction.right_ascension()),
            format_f64(row.direction.declination()),
            alignment,
            crossings,
            bound,
            error,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_counts<W: Write>(out: W, start: DateTime<Utc>, bins: &[CountBin]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COUNTS_HEADER)?;
    for b in bins {
        w.write_record([instant(offset(start, b.t_start)), b.counts.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a counts file; bin starts are returned relative to `start`.
pub fn read_counts<R: Read>(input: R, start: DateTime<Utc>) -> Result<Vec<CountBin>, IoError> {
    let mut r = csv::Reader::from_reader(input);
    header_check(&mut r, &COUNTS_HEADER)?;
    let mut bins: Vec<CountBin> = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = k as u64 + 2;
        let t: DateTime<Utc> = field(&rec, row, 0, "t_bin_start_utc")?;
        let delta = t - start;
        let t_start = delta.num_seconds() as f64 + f64::from(delta.subsec_nanos()) * 1e-9;
        if bins.last().is_some_and(|p| !(p.t_start < t_start)) {
            return Err(schema(row, "bin starts must be strictly increasing"));
        }
        bins.push(CountBin {
            t_start,
            counts: field(&rec, row, 1, "counts")?,
        });
    }
    Ok(bins)
}
