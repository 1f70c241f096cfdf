//! Model-free short-term forecasting of traffic flow.
//!
//! The pipeline splits a regularly sampled series into a moving-average trend
//! and quick fluctuations, estimates the local trend slope with a sliding
//! first-degree algebraic estimator, and forecasts the trend with four
//! methods:
//!
//! * raw persistence, `Q(t + dt) = Q(t)`;
//! * scaled persistence, the causal trend times the ratio the trend went
//!   through over the same clock span one day earlier;
//! * algebraic, trend plus estimated slope times horizon;
//! * mixed, trend plus whichever of the algebraic slope and the
//!   persistence-implied slope has the smaller magnitude.
//!
//! Forecasts are scored against a non-causal (centered) trend at the target
//! time. Rolling volatility is the windowed standard deviation of the series
//! around its own mean.
//!
//! Rolling computations are split into fixed-size blocks, each of which starts
//! from a full re-summation. With the `parallel` feature (on by default)
//! blocks run on the rayon pool; the block layout does not depend on the
//! thread count, so sequential and parallel runs are bit-identical.

pub mod algebraic;
pub mod error;
pub mod eval;
pub mod exec;
pub mod forecast;
pub mod series;
pub mod synth;
pub mod trend;
pub mod volatility;

pub use algebraic::{fit_affine, slope_series, AffineFit};
pub use error::{Error, Result};
pub use eval::{build_report, gain_percent, sse_vs_trend, EvalReport, Gain};
pub use forecast::{run_forecaster, DayOffset, ForecastParams, ForecastRun, Horizon, Method};
pub use series::{emit_csv, parse_csv, DerivedSeries, GapPolicy, Parsed, TimeSeries, Window};
pub use synth::{generate, reference_dataset, reference_scenario, TrafficScenario};
pub use trend::{causal_mean, centered_mean, decompose, MeanKind, TrendDecomposition};
pub use volatility::{forecast_volatility, rolling_volatility, VolatilitySeries};
