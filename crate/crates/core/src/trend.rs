//! Moving-average trends and the trend + quick-fluctuation decomposition.

use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::series::{DerivedSeries, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanKind {
    /// Mean of the `n` samples ending at `t`.
    Causal,
    /// Mean of `t - (n/2 - 1) ..= t + n/2`.
    Centered,
}

impl FromStr for MeanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "causal" => Ok(Self::Causal),
            "centered" => Ok(Self::Centered),
            other => Err(Error::Param(format!("unknown mean kind `{other}`"))),
        }
    }
}

impl MeanKind {
    /// Index of the first output for window length `n`, i.e. the lag between
    /// the start of a window and the time it is attributed to.
    pub fn first_valid(self, n: usize) -> usize {
        match self {
            MeanKind::Causal => n - 1,
            MeanKind::Centered => n / 2 - 1,
        }
    }

    pub(crate) fn check_window(self, n: usize, len: usize) -> Result<()> {
        match self {
            MeanKind::Causal if n == 0 => {
                return Err(Error::Param("window length must be at least 1".into()))
            }
            MeanKind::Centered if n < 2 || !n.is_multiple_of(2) => {
                return Err(Error::Param(format!(
                    "centered window length must be even and at least 2, got {n}"
                )))
            }
            _ => {}
        }
        if n > len {
            return Err(Error::InsufficientHistory {
                required: n,
                available: len,
            });
        }
        Ok(())
    }
}

/// Means of every full `n`-window of `values`: output `k` averages
/// `values[k..k + n]`.
///
/// Rolling sum, O(1) per output; each block of [`exec::BLOCK`] outputs starts
/// from a fresh summation so accumulated drift stays bounded.
pub(crate) fn window_means(values: &[f64], n: usize) -> Vec<f64> {
    debug_assert!(n >= 1 && n <= values.len());
    let inv = 1.0 / n as f64;
    exec::fill_blocks(values.len() + 1 - n, |start, out| {
        let mut sum: f64 = values[start..start + n].iter().sum();
        out[0] = sum * inv;
        for (k, o) in out.iter_mut().enumerate().skip(1) {
            let end = start + k + n - 1;
            sum += values[end] - values[end - n];
            *o = sum * inv;
        }
    })
}

fn moving_mean(series: &TimeSeries, n: usize, kind: MeanKind) -> Result<DerivedSeries> {
    kind.check_window(n, series.len())?;
    let means = window_means(series.values(), n);
    Ok(DerivedSeries::new(series, kind.first_valid(n), means))
}

/// Causal moving average `(x[i-n+1] + ... + x[i]) / n`, defined for `i >= n-1`.
pub fn causal_mean(series: &TimeSeries, n: usize) -> Result<DerivedSeries> {
    moving_mean(series, n, MeanKind::Causal)
}

/// Non-causal moving average over `x[i-(n/2-1)] ..= x[i+n/2]`.
///
/// The span leans one sample toward the future; for `n = 100` it is
/// `t-49 ..= t+50`. Odd `n` is rejected.
pub fn centered_mean(series: &TimeSeries, n: usize) -> Result<DerivedSeries> {
    moving_mean(series, n, MeanKind::Centered)
}

pub fn mean(series: &TimeSeries, n: usize, kind: MeanKind) -> Result<DerivedSeries> {
    moving_mean(series, n, kind)
}

/// A series split into a smooth trend and quick fluctuations.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendDecomposition {
    pub trend: DerivedSeries,
    pub fluctuation: DerivedSeries,
    pub kind: MeanKind,
    pub window: usize,
}

impl TrendDecomposition {
    pub fn valid_range(&self) -> Range<usize> {
        self.trend.valid_range()
    }
}

pub fn decompose(series: &TimeSeries, kind: MeanKind, n: usize) -> Result<TrendDecomposition> {
    let trend = moving_mean(series, n, kind)?;
    let range = trend.valid_range();
    let fluctuation: Vec<f64> = series.values()[range.clone()]
        .iter()
        .zip(trend.values())
        .map(|(x, t)| x - t)
        .collect();
    Ok(TrendDecomposition {
        fluctuation: DerivedSeries::new(series, range.start, fluctuation),
        trend,
        kind,
        window: n,
    })
}
