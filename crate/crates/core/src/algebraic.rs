//! Sliding-window algebraic estimation of a local affine model.
//!
//! Over a window of duration `T` with `tau` measured from its start, the
//! first-degree algebraic estimator reads
//!
//! ```text
//! a1 = 6 / T^3 * ∫ (2 tau - T) y(tau) dtau
//! a0 = 2 / T^2 * ∫ (2 T - 3 tau) y(tau) dtau      (level at the window start)
//! ```
//!
//! The iterated integrals act as low-pass filters. On sampled data we use the
//! exact discrete counterpart, which is the least-squares line through the
//! window: it reproduces affine inputs exactly, whereas trapezoid quadrature of
//! the integrals carries an `O(h^2 / T^2)` bias. [`fit_affine_integral`] keeps
//! the quadrature form for comparison.

use crate::error::{Error, Result};
use crate::exec;
use crate::series::{DerivedSeries, TimeSeries, Window};

/// Level and slope of the affine model fitted on one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFit {
    /// Estimated signal value at the last sample of the window.
    pub level_at_end: f64,
    /// Estimated slope in series units per minute.
    pub slope_per_minute: f64,
    pub window: Window,
}

/// Centered slope weights `12 (k - (N-1)/2) / (h N (N^2 - 1))`.
struct SlopeKernel {
    weights: Vec<f64>,
}

impl SlopeKernel {
    fn new(n: usize, h: f64) -> Self {
        let nf = n as f64;
        let center = (nf - 1.0) / 2.0;
        let scale = 12.0 / (h * nf * (nf * nf - 1.0));
        Self {
            weights: (0..n).map(|k| (k as f64 - center) * scale).collect(),
        }
    }

    fn slope(&self, window: &[f64]) -> f64 {
        self.weights.iter().zip(window).map(|(w, y)| w * y).sum()
    }
}

fn check_window(samples: &[f64], h: f64) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::DegenerateWindow(samples.len()));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Param(format!("step must be positive, got {h}")));
    }
    if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::Input(format!("non-finite sample at window position {k}")));
    }
    Ok(())
}

/// Fits `y = a0 + a1 * tau` on `samples` spaced `h` minutes apart.
pub fn fit_affine(samples: &[f64], h: f64) -> Result<AffineFit> {
    check_window(samples, h)?;
    let n = samples.len();
    let slope = SlopeKernel::new(n, h).slope(samples);
    let mean = samples.iter().sum::<f64>() / n as f64;
    Ok(AffineFit {
        level_at_end: mean + slope * h * (n - 1) as f64 / 2.0,
        slope_per_minute: slope,
        window: Window::new(n - 1, n),
    })
}

/// The continuous-time estimator evaluated by trapezoid quadrature.
pub fn fit_affine_integral(samples: &[f64], h: f64) -> Result<AffineFit> {
    check_window(samples, h)?;
    let n = samples.len();
    let t = (n - 1) as f64 * h;
    let trapezoid = |f: &dyn Fn(f64) -> f64| -> f64 {
        let mut acc = 0.0;
        for (k, &y) in samples.iter().enumerate() {
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            acc += w * f(k as f64 * h) * y;
        }
        acc * h
    };
    let slope = 6.0 / t.powi(3) * trapezoid(&|tau| 2.0 * tau - t);
    let level_start = 2.0 / (t * t) * trapezoid(&|tau| 2.0 * t - 3.0 * tau);
    Ok(AffineFit {
        level_at_end: level_start + slope * t,
        slope_per_minute: slope,
        window: Window::new(n - 1, n),
    })
}

/// Slope of the trailing `n`-sample fit at every index `i >= n - 1`.
pub fn slope_series(series: &TimeSeries, n: usize) -> Result<DerivedSeries> {
    if n < 2 {
        return Err(Error::DegenerateWindow(n));
    }
    if n > series.len() {
        return Err(Error::InsufficientHistory {
            required: n,
            available: series.len(),
        });
    }
    let kernel = SlopeKernel::new(n, f64::from(series.step_minutes()));
    let values = series.values();
    let slopes = exec::fill_blocks(values.len() + 1 - n, |start, out| {
        for (k, o) in out.iter_mut().enumerate() {
            let s = start + k;
            *o = kernel.slope(&values[s..s + n]);
        }
    });
    Ok(DerivedSeries::new(series, n - 1, slopes))
}
