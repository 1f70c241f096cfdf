//! Regularly sampled series, CSV ingestion/emission and windowing.

use std::fmt::Write as _;
use std::ops::Range;

use chrono::{DateTime, NaiveDateTime};

use crate::error::{Error, Result};

const ISO_MINUTE: &str = "%Y-%m-%dT%H:%M";

/// A regularly sampled real-valued signal.
///
/// Sample `i` sits at `start_minute + i * step_minutes`, where times are naive
/// minutes since 1970-01-01T00:00. All stored values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    start_minute: i64,
    step_minutes: u32,
    values: Vec<f64>,
    unit_label: String,
}

impl TimeSeries {
    pub fn new(
        start_minute: i64,
        step_minutes: u32,
        values: Vec<f64>,
        unit_label: impl Into<String>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if step_minutes == 0 {
            return Err(Error::Param("step_minutes must be at least 1".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite value at index {i}")));
        }
        Ok(Self {
            start_minute,
            step_minutes,
            values,
            unit_label: unit_label.into(),
        })
    }

    /// One-minute series starting at the epoch; handy for tests and synthetic data.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(0, 1, values, "")
    }

    pub fn start_minute(&self) -> i64 {
        self.start_minute
    }

    pub fn step_minutes(&self) -> u32 {
        self.step_minutes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit_label(&self) -> &str {
        &self.unit_label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time of sample `i` in epoch minutes.
    pub fn minute_at(&self, i: usize) -> i64 {
        self.start_minute + i as i64 * i64::from(self.step_minutes)
    }

    /// Same grid, new values. Values must be finite and the same length.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::Input(format!(
                "length mismatch: {} vs {}",
                values.len(),
                self.values.len()
            )));
        }
        Self::new(self.start_minute, self.step_minutes, values, self.unit_label.clone())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }
}

/// Values defined on a contiguous sub-range of a parent series' grid.
///
/// Derived quantities (moving means, slopes, volatilities) are undefined
/// during their warm-up; those indices are simply outside `valid_range`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedSeries {
    start_minute: i64,
    step_minutes: u32,
    parent_len: usize,
    offset: usize,
    values: Vec<f64>,
}

impl DerivedSeries {
    pub(crate) fn new(parent: &TimeSeries, offset: usize, values: Vec<f64>) -> Self {
        debug_assert!(offset + values.len() <= parent.len());
        Self {
            start_minute: parent.start_minute,
            step_minutes: parent.step_minutes,
            parent_len: parent.len(),
            offset,
            values,
        }
    }

    /// Value at parent index `i`, if defined there.
    pub fn get(&self, i: usize) -> Option<f64> {
        i.checked_sub(self.offset)
            .and_then(|k| self.values.get(k).copied())
    }

    pub fn valid_range(&self) -> Range<usize> {
        self.offset..self.offset + self.values.len()
    }

    pub fn is_valid(&self, i: usize) -> bool {
        self.valid_range().contains(&i)
    }

    /// Values on the valid range, oldest first.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn parent_len(&self) -> usize {
        self.parent_len
    }

    pub fn step_minutes(&self) -> u32 {
        self.step_minutes
    }

    pub fn minute_at(&self, i: usize) -> i64 {
        self.start_minute + i as i64 * i64::from(self.step_minutes)
    }

    /// The valid part as a standalone series starting at its first valid time.
    pub fn to_series(&self, unit_label: &str) -> Result<TimeSeries> {
        TimeSeries::new(
            self.minute_at(self.offset),
            self.step_minutes,
            self.values.clone(),
            unit_label,
        )
    }
}

/// The samples `[end_index + 1 - length, end_index]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub end_index: usize,
    pub length: usize,
}

impl Window {
    pub fn new(end_index: usize, length: usize) -> Self {
        Self { end_index, length }
    }

    pub fn start_index(&self) -> Option<usize> {
        (self.end_index + 1).checked_sub(self.length)
    }
}

/// Window contents, oldest first.
pub fn slice(series: &TimeSeries, window: Window) -> Result<&[f64]> {
    if window.length == 0 {
        return Err(Error::DegenerateWindow(0));
    }
    if window.end_index >= series.len() {
        return Err(Error::Bounds {
            edge: "end",
            detail: format!("end index {} >= length {}", window.end_index, series.len()),
        });
    }
    let start = window.start_index().ok_or_else(|| Error::Bounds {
        edge: "start",
        detail: format!(
            "length {} reaches before index 0 from end index {}",
            window.length, window.end_index
        ),
    })?;
    Ok(&series.values[start..=window.end_index])
}

/// How irregular input grids are handled by [`parse_csv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapPolicy {
    /// Longest run of missing samples that is filled by interpolation.
    pub max_gap: usize,
    pub step_minutes: u32,
}

impl Default for GapPolicy {
    fn default() -> Self {
        Self {
            max_gap: 5,
            step_minutes: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub series: TimeSeries,
    /// Number of samples filled by linear interpolation.
    pub interpolated: usize,
}

/// Epoch minutes from either an integer or an ISO-8601 minute timestamp.
pub fn parse_timestamp(s: &str) -> Option<i64> {
    let s = s.trim();
    if let Ok(m) = s.parse::<i64>() {
        return Some(m);
    }
    let dt = NaiveDateTime::parse_from_str(s, ISO_MINUTE)
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S"))
        .ok()?;
    let secs = dt.and_utc().timestamp();
    (secs % 60 == 0).then_some(secs.div_euclid(60))
}

pub fn format_timestamp(minute: i64) -> String {
    DateTime::from_timestamp(minute * 60, 0)
        .map(|dt| dt.naive_utc().format(ISO_MINUTE).to_string())
        .unwrap_or_else(|| minute.to_string())
}

/// Formats with 17 significant digits, enough to round-trip any f64.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parses `timestamp,value` CSV onto a regular grid.
pub fn parse_csv(text: &str, policy: &GapPolicy) -> Result<Parsed> {
    if policy.step_minutes == 0 {
        return Err(Error::Param("step_minutes must be at least 1".into()));
    }
    let step = i64::from(policy.step_minutes);
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));

    let header = lines.find(|(_, l)| !l.trim().is_empty());
    match header {
        Some((_, h)) if h.trim().trim_start_matches('\u{feff}') == "timestamp,value" => {}
        Some((line, h)) => {
            return Err(Error::Parse {
                line,
                msg: format!("expected header `timestamp,value`, found `{}`", h.trim()),
            })
        }
        None => return Err(Error::EmptySeries),
    }

    let mut start: Option<i64> = None;
    let mut prev: Option<(i64, f64, String)> = None;
    let mut values = Vec::new();
    let mut interpolated = 0;

    for (line, raw) in lines {
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        let (ts, val) = row.split_once(',').ok_or_else(|| Error::Parse {
            line,
            msg: "expected two comma-separated fields".into(),
        })?;
        let minute = parse_timestamp(ts).ok_or_else(|| Error::Parse {
            line,
            msg: format!("bad timestamp `{}`", ts.trim()),
        })?;
        let value: f64 = val.trim().parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad value `{}`", val.trim()),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                line,
                msg: "non-finite value".into(),
            });
        }

        if let Some((pm, pv, pts)) = &prev {
            if minute <= *pm {
                return Err(Error::NonMonotone { line });
            }
            let diff = minute - pm;
            if diff % step != 0 {
                return Err(Error::Parse {
                    line,
                    msg: format!("timestamp off the {step}-minute grid"),
                });
            }
            let missing = (diff / step - 1) as usize;
            if missing > policy.max_gap {
                return Err(Error::Gap {
                    from: pts.clone(),
                    to: ts.trim().to_string(),
                    missing,
                    max: policy.max_gap,
                });
            }
            let span = (missing + 1) as f64;
            for k in 1..=missing {
                let w = k as f64 / span;
                values.push(pv + (value - pv) * w);
            }
            interpolated += missing;
        } else {
            start = Some(minute);
        }
        values.push(value);
        prev = Some((minute, value, ts.trim().to_string()));
    }

    let start = start.ok_or(Error::EmptySeries)?;
    let series = TimeSeries::new(start, policy.step_minutes, values, "veh/min")?;
    Ok(Parsed {
        series,
        interpolated,
    })
}

/// Writes `timestamp,value` CSV with ISO minute timestamps and LF endings.
pub fn emit_csv(series: &TimeSeries) -> String {
    let mut out = String::with_capacity(series.len() * 40 + 16);
    out.push_str("timestamp,value\n");
    for (i, v) in series.values().iter().enumerate() {
        let _ = writeln!(out, "{},{}", format_timestamp(series.minute_at(i)), format_value(*v));
    }
    out
}
