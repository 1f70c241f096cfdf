//! Persistence, scaled persistence, algebraic and mixed forecasters.
//!
//! All trend-based methods forecast the causal trend `E(t)` (the `n`-sample
//! causal mean) forward by `dt` samples:
//!
//! * `Pe`:  `E(t) * Sc(t)` with `Sc(t) = E(t - day + dt) / E(t - day)`
//! * `Al`:  `E(t) + a1(t) * dt`, `a1` the sliding-window slope estimate
//! * `Mi`:  `E(t) + a(t) * dt` where `a` is whichever of `a1(t)` and
//!   `E(t) (Sc(t) - 1) / dt` is strictly smaller in magnitude (ties go to the
//!   latter)
//!
//! `Raw` is plain persistence of the last observation.

use std::fmt;
use std::fmt::Write as _;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebraic::slope_series;
use crate::error::{Error, Result};
use crate::exec;
use crate::series::{format_timestamp, format_value, DerivedSeries, TimeSeries};
use crate::trend::causal_mean;

/// Horizons used for the comparison tables, in minutes.
pub const DEFAULT_HORIZONS: [usize; 3] = [5, 15, 60];

pub const DEFAULT_EPS: f64 = 0.5;

/// Forecast lead time in samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Horizon(usize);

impl Horizon {
    pub fn new(delta_t: usize) -> Result<Self> {
        if delta_t == 0 {
            return Err(Error::Param("horizon must be positive".into()));
        }
        Ok(Self(delta_t))
    }

    pub fn delta_t(self) -> usize {
        self.0
    }

    pub fn defaults() -> [Horizon; 3] {
        DEFAULT_HORIZONS.map(Horizon)
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Number of samples in one day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DayOffset {
    pub samples_per_day: usize,
}

impl DayOffset {
    pub fn for_step(step_minutes: u32) -> Result<Self> {
        if step_minutes == 0 || 1440 % step_minutes != 0 {
            return Err(Error::Param(format!(
                "step of {step_minutes} minutes does not divide a day"
            )));
        }
        Ok(Self {
            samples_per_day: 1440 / step_minutes as usize,
        })
    }
}

impl Default for DayOffset {
    fn default() -> Self {
        Self {
            samples_per_day: 1440,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Scaled persistence.
    Pe,
    /// Algebraic trend extrapolation.
    Al,
    /// Mixed slope rule.
    Mi,
    /// Last observation carried forward.
    #[serde(rename = "Raw")]
    RawPersistence,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Pe, Method::Al, Method::Mi, Method::RawPersistence];

    pub fn label(self) -> &'static str {
        match self {
            Method::Pe => "Pe",
            Method::Al => "Al",
            Method::Mi => "Mi",
            Method::RawPersistence => "Raw",
        }
    }

    fn uses_day_lag(self) -> bool {
        matches!(self, Method::Pe | Method::Mi)
    }

    fn uses_slope(self) -> bool {
        matches!(self, Method::Al | Method::Mi)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pe" => Ok(Method::Pe),
            "al" => Ok(Method::Al),
            "mi" => Ok(Method::Mi),
            "raw" => Ok(Method::RawPersistence),
            other => Err(Error::Param(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastParams {
    /// Causal trend window `n`.
    pub trend_window: usize,
    /// Window of the slope estimator.
    pub slope_window: usize,
    /// Below this magnitude the day-lagged trend is not used as a denominator.
    pub eps: f64,
}

impl Default for ForecastParams {
    fn default() -> Self {
        Self {
            trend_window: 100,
            slope_window: 100,
            eps: DEFAULT_EPS,
        }
    }
}

fn lookup(series: &DerivedSeries, i: usize) -> Result<f64> {
    if i >= series.parent_len() {
        return Err(Error::Bounds {
            edge: "end",
            detail: format!("index {i} >= length {}", series.parent_len()),
        });
    }
    series.get(i).ok_or(Error::InsufficientHistory {
        required: series.valid_range().start + 1,
        available: i + 1,
    })
}

fn day_lagged(i: usize, dt: Horizon, day: DayOffset) -> Result<usize> {
    if dt.0 >= day.samples_per_day {
        return Err(Error::Param(format!(
            "horizon {} must be shorter than one day ({} samples)",
            dt.0, day.samples_per_day
        )));
    }
    i.checked_sub(day.samples_per_day)
        .ok_or(Error::InsufficientHistory {
            required: day.samples_per_day + 1,
            available: i + 1,
        })
}

/// `num / den`, or neutral 1 flagged as guarded when `|den| < eps`.
fn guarded_ratio(num: f64, den: f64, eps: f64) -> (f64, bool) {
    if den.abs() < eps {
        (1.0, true)
    } else {
        (num / den, false)
    }
}

/// Strict "smaller than": equal magnitudes select the persistence slope.
fn pick_mixed(algebraic: f64, persistence: f64) -> f64 {
    if algebraic.abs() < persistence.abs() {
        algebraic
    } else {
        persistence
    }
}

/// Plain persistence: the forecast for `i + dt` is `x[i]`.
pub fn persistence(series: &TimeSeries, i: usize, _dt: Horizon) -> Result<f64> {
    series.values().get(i).copied().ok_or_else(|| Error::Bounds {
        edge: "end",
        detail: format!("index {i} >= length {}", series.len()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFactor {
    pub value: f64,
    /// The denominator fell below `eps` and neutral scaling was used.
    pub guarded: bool,
}

/// `Sc(t) = E(t - day + dt) / E(t - day)`.
pub fn scale_factor(
    trend: &DerivedSeries,
    i: usize,
    dt: Horizon,
    day: DayOffset,
    eps: f64,
) -> Result<ScaleFactor> {
    let lag = day_lagged(i, dt, day)?;
    let den = lookup(trend, lag)?;
    let num = lookup(trend, lag + dt.0)?;
    let (value, guarded) = guarded_ratio(num, den, eps);
    Ok(ScaleFactor { value, guarded })
}

pub fn scaled_persistence(
    trend: &DerivedSeries,
    i: usize,
    dt: Horizon,
    day: DayOffset,
    eps: f64,
) -> Result<f64> {
    let sc = scale_factor(trend, i, dt, day, eps)?;
    Ok(lookup(trend, i)? * sc.value)
}

/// `E(t) + a1(t) * dt`, with `dt` converted to minutes.
pub fn algebraic_forecast(
    trend: &DerivedSeries,
    slope: &DerivedSeries,
    i: usize,
    dt: Horizon,
) -> Result<f64> {
    let minutes = (dt.0 * trend.step_minutes() as usize) as f64;
    Ok(lookup(trend, i)? + lookup(slope, i)? * minutes)
}

/// The two candidate slopes of the mixed rule and the one it applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedSlope {
    pub algebraic: f64,
    /// `E(t) (Sc(t) - 1) / dt`, per minute.
    pub persistence: f64,
    pub applied: f64,
}

pub fn mixed_slope(
    trend: &DerivedSeries,
    slope: &DerivedSeries,
    i: usize,
    dt: Horizon,
    day: DayOffset,
    eps: f64,
) -> Result<MixedSlope> {
    let sc = scale_factor(trend, i, dt, day, eps)?;
    let level = lookup(trend, i)?;
    let algebraic = lookup(slope, i)?;
    let minutes = (dt.0 * trend.step_minutes() as usize) as f64;
    let persistence = level * (sc.value - 1.0) / minutes;
    Ok(MixedSlope {
        algebraic,
        persistence,
        applied: pick_mixed(algebraic, persistence),
    })
}

pub fn mixed_forecast(
    trend: &DerivedSeries,
    slope: &DerivedSeries,
    i: usize,
    dt: Horizon,
    day: DayOffset,
    eps: f64,
) -> Result<f64> {
    let m = mixed_slope(trend, slope, i, dt, day, eps)?;
    let minutes = (dt.0 * trend.step_minutes() as usize) as f64;
    Ok(lookup(trend, i)? + m.applied * minutes)
}

/// Forecasts issued at every index of a series for one method and horizon.
///
/// `predicted[i]` is the forecast for index `i + dt`; it is NaN wherever
/// `valid[i]` is false.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRun {
    pub method: Method,
    pub horizon: Horizon,
    pub predicted: Vec<f64>,
    pub valid: Vec<bool>,
    /// Valid issue points where the scale factor fell back to 1.
    pub guarded: usize,
}

impl ForecastRun {
    pub fn issued_at(&self) -> Range<usize> {
        0..self.predicted.len()
    }

    pub fn valid_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.valid.iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| i)
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        (*self.valid.get(i)?).then(|| self.predicted[i])
    }

    /// Plot-data CSV keyed by target time.
    ///
    /// Columns are `t,actual,forecast,valid`, or `t,actual,trend_ref,forecast,valid`
    /// when a reference trend is supplied. One row per issue index whose
    /// target lies inside `actual`; invalid cells are left empty.
    pub fn to_csv(&self, actual: &TimeSeries, reference: Option<&DerivedSeries>) -> String {
        let dt = self.horizon.0;
        let rows = actual.len().saturating_sub(dt).min(self.predicted.len());
        let mut out = String::with_capacity(rows * 64 + 40);
        out.push_str(if reference.is_some() {
            "t,actual,trend_ref,forecast,valid\n"
        } else {
            "t,actual,forecast,valid\n"
        });
        for i in 0..rows {
            let target = i + dt;
            let _ = write!(
                out,
                "{},{}",
                format_timestamp(actual.minute_at(target)),
                format_value(actual.values()[target])
            );
            if let Some(r) = reference {
                out.push(',');
                if let Some(v) = r.get(target) {
                    out.push_str(&format_value(v));
                }
            }
            out.push(',');
            if let Some(v) = self.get(i) {
                out.push_str(&format_value(v));
            }
            out.push_str(if self.valid[i] { ",1\n" } else { ",0\n" });
        }
        out
    }
}

/// First issue index at which `method` has all the history it needs.
pub fn first_valid_index(method: Method, params: &ForecastParams, day: DayOffset) -> usize {
    let trend_ready = params.trend_window - 1;
    let base = if method.uses_slope() {
        trend_ready.max(params.slope_window - 1)
    } else if method == Method::RawPersistence {
        0
    } else {
        trend_ready
    };
    if method.uses_day_lag() {
        base.max(day.samples_per_day + trend_ready)
    } else {
        base
    }
}

/// Shortest series admitting one valid forecast.
pub fn required_length(method: Method, dt: Horizon, params: &ForecastParams, day: DayOffset) -> usize {
    first_valid_index(method, params, day) + dt.0 + 1
}

fn check_params(params: &ForecastParams) -> Result<()> {
    if params.trend_window == 0 {
        return Err(Error::Param("trend window must be at least 1".into()));
    }
    if params.slope_window < 2 {
        return Err(Error::Param("slope window must be at least 2".into()));
    }
    if !(params.eps >= 0.0 && params.eps.is_finite()) {
        return Err(Error::Param(format!("eps must be non-negative, got {}", params.eps)));
    }
    Ok(())
}

/// Runs one forecaster over every issue index of `series`.
pub fn run_forecaster(
    series: &TimeSeries,
    method: Method,
    dt: Horizon,
    params: &ForecastParams,
) -> Result<ForecastRun> {
    check_params(params)?;
    let day = DayOffset::for_step(series.step_minutes())?;
    if method.uses_day_lag() && dt.0 >= day.samples_per_day {
        return Err(Error::Param(format!(
            "horizon {dt} must be shorter than one day ({} samples)",
            day.samples_per_day
        )));
    }
    let len = series.len();
    let first = first_valid_index(method, params, day);
    let need = required_length(method, dt, params, day);
    if len < need {
        return Err(Error::EmptyRun(format!(
            "method {method} at horizon {dt} needs at least {need} samples, series has {len}"
        )));
    }
    let last = len - 1 - dt.0;

    let mut predicted = vec![f64::NAN; len];
    let mut valid = vec![false; len];
    valid[first..=last].iter_mut().for_each(|v| *v = true);
    let mut guarded = 0;

    if method == Method::RawPersistence {
        predicted[first..=last].copy_from_slice(&series.values()[first..=last]);
    } else {
        let trend = causal_mean(series, params.trend_window)?;
        let slope = if method.uses_slope() {
            Some(slope_series(series, params.slope_window)?)
        } else {
            None
        };
        let minutes = (dt.0 * series.step_minutes() as usize) as f64;
        let lag = day.samples_per_day;
        let eps = params.eps;
        let trend_at = |i: usize| trend.get(i).expect("trend valid on run range");
        let slope_at = |i: usize| {
            slope
                .as_ref()
                .and_then(|s| s.get(i))
                .expect("slope valid on run range")
        };
        let ratio_at = |i: usize| guarded_ratio(trend_at(i - lag + dt.0), trend_at(i - lag), eps);

        let span = exec::fill_blocks(last + 1 - first, |start, out| {
            for (k, o) in out.iter_mut().enumerate() {
                let i = first + start + k;
                let level = trend_at(i);
                *o = match method {
                    Method::Pe => level * ratio_at(i).0,
                    Method::Al => level + slope_at(i) * minutes,
                    Method::Mi => {
                        let s_pe = level * (ratio_at(i).0 - 1.0) / minutes;
                        level + pick_mixed(slope_at(i), s_pe) * minutes
                    }
                    Method::RawPersistence => unreachable!(),
                };
            }
        });
        predicted[first..=last].copy_from_slice(&span);
        if method.uses_day_lag() {
            guarded = (first..=last).filter(|&i| ratio_at(i).1).count();
        }
    }

    Ok(ForecastRun {
        method,
        horizon: dt,
        predicted,
        valid,
        guarded,
    })
}
