//! Rolling volatility: the windowed standard deviation of a series around its
//! own moving mean, `sqrt(E(X^2) - E(X)^2)`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::exec;
use crate::forecast::{run_forecaster, ForecastParams, ForecastRun, Horizon, Method};
use crate::series::{format_timestamp, format_value, DerivedSeries, TimeSeries};
use crate::trend::MeanKind;

pub const ANALYSIS_WINDOWS: [usize; 3] = [100, 250, 500];
pub const FORECAST_WINDOW: usize = 250;
pub const FORECAST_HORIZON: usize = 15;

#[derive(Debug, Clone, PartialEq)]
pub struct VolatilitySeries {
    pub values: DerivedSeries,
    pub window: usize,
    pub mean_kind: MeanKind,
}

impl VolatilitySeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,volatility\n");
        for (v, i) in self.values.values().iter().zip(self.values.valid_range()) {
            let _ = writeln!(out, "{},{}", format_timestamp(self.values.minute_at(i)), format_value(*v));
        }
        out
    }

    pub fn to_series(&self) -> Result<TimeSeries> {
        self.values.to_series("volatility")
    }
}

/// Population standard deviation of every full `n`-window.
///
/// Each block accumulates deviations from a pivot (its first sample), which
/// keeps `M2 - M1^2` well conditioned when the level is large compared with
/// the spread; the result is unchanged algebraically.
fn window_std(values: &[f64], n: usize) -> Vec<f64> {
    let inv = 1.0 / n as f64;
    exec::fill_blocks(values.len() + 1 - n, |start, out| {
        let pivot = values[start];
        let (mut s1, mut s2) = (0.0, 0.0);
        for &x in &values[start..start + n] {
            let d = x - pivot;
            s1 += d;
            s2 += d * d;
        }
        let std = |s1: f64, s2: f64| {
            let m1 = s1 * inv;
            (s2 * inv - m1 * m1).max(0.0).sqrt()
        };
        out[0] = std(s1, s2);
        for (k, o) in out.iter_mut().enumerate().skip(1) {
            let end = start + k + n - 1;
            let add = values[end] - pivot;
            let drop = values[end - n] - pivot;
            s1 += add - drop;
            s2 += add * add - drop * drop;
            *o = std(s1, s2);
        }
    })
}

pub fn rolling_volatility(
    series: &TimeSeries,
    n: usize,
    mean_kind: MeanKind,
) -> Result<VolatilitySeries> {
    if n < 2 {
        return Err(Error::DegenerateWindow(n));
    }
    mean_kind.check_window(n, series.len())?;
    let std = window_std(series.values(), n);
    Ok(VolatilitySeries {
        values: DerivedSeries::new(series, mean_kind.first_valid(n), std),
        window: n,
        mean_kind,
    })
}

/// Algebraic forecast of a causal volatility series.
///
/// The returned run is indexed on [`VolatilitySeries::to_series`], i.e. index
/// 0 is the first valid volatility sample. Both the trend and the slope of the
/// volatility use `slope_window`.
pub fn forecast_volatility(
    vol: &VolatilitySeries,
    dt: Horizon,
    slope_window: usize,
) -> Result<ForecastRun> {
    if vol.mean_kind != MeanKind::Causal {
        return Err(Error::Acausal);
    }
    let series = vol.to_series()?;
    let params = ForecastParams {
        trend_window: slope_window,
        slope_window,
        ..ForecastParams::default()
    };
    run_forecaster(&series, Method::Al, dt, &params)
}
