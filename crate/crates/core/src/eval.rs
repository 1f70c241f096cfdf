//! Squared-error scoring against the centered trend and gain tables.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use indexmap::IndexMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec;
use crate::forecast::{run_forecaster, ForecastParams, ForecastRun, Horizon, Method};
use crate::series::{DerivedSeries, TimeSeries};
use crate::trend::centered_mean;

/// Improvement of a method's SSE over scaled persistence, in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gain {
    Finite(f64),
    /// The method's SSE is exactly zero while the baseline's is not.
    Infinite,
}

impl Gain {
    pub fn value(self) -> f64 {
        match self {
            Gain::Finite(v) => v,
            Gain::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for Gain {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Gain::Finite(v) => s.serialize_f64(*v),
            Gain::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `(sse_pe / sse_method - 1) * 100`.
pub fn gain_percent(sse_pe: f64, sse_method: f64) -> Result<Gain> {
    if !(sse_pe >= 0.0 && sse_method >= 0.0) || !sse_pe.is_finite() || !sse_method.is_finite() {
        return Err(Error::Param(format!(
            "SSE values must be finite and non-negative, got {sse_pe} and {sse_method}"
        )));
    }
    if sse_pe == sse_method {
        return Ok(Gain::Finite(0.0));
    }
    if sse_method == 0.0 {
        return Ok(Gain::Infinite);
    }
    Ok(Gain::Finite((sse_pe / sse_method - 1.0) * 100.0))
}

/// Sum over masked issue indices `i` of `(predicted[i] - reference[i + dt])^2`.
pub fn sse_vs_trend(run: &ForecastRun, reference: &DerivedSeries, mask: &[bool]) -> Result<f64> {
    let dt = run.horizon.delta_t();
    let mut sse = 0.0;
    let mut count = 0usize;
    for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        let predicted = run.get(i).ok_or_else(|| {
            Error::Input(format!("mask selects index {i} where the forecast is invalid"))
        })?;
        let target = reference.get(i + dt).ok_or_else(|| {
            Error::Input(format!("mask selects index {i} whose target has no reference"))
        })?;
        let e = predicted - target;
        sse += e * e;
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyRun("empty evaluation mask".into()));
    }
    Ok(sse)
}

/// Issue indices where every run and the reference at the target are valid.
pub fn joint_mask(runs: &[ForecastRun], reference: &DerivedSeries, dt: Horizon) -> Vec<bool> {
    let len = runs.iter().map(|r| r.valid.len()).min().unwrap_or(0);
    (0..len)
        .map(|i| runs.iter().all(|r| r.valid[i]) && reference.is_valid(i + dt.delta_t()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalParams {
    pub forecast: ForecastParams,
    /// Window of the centered reference trend.
    pub reference_window: usize,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self {
            forecast: ForecastParams::default(),
            reference_window: 100,
        }
    }
}

/// Scores of all requested methods at one horizon, on a shared index set.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub horizon: Horizon,
    pub reference_window: usize,
    pub sse: IndexMap<Method, f64>,
    /// Present only when `Pe` was evaluated; `Pe` itself maps to 0.
    pub gain_percent: IndexMap<Method, Gain>,
    pub valid_count: usize,
    pub valid_range: Option<RangeInclusive<usize>>,
    /// The shared mask, indexed by issue index.
    pub mask: Vec<bool>,
}

#[derive(Serialize)]
struct MethodJson {
    sse: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gain_percent: Option<Gain>,
}

#[derive(Serialize)]
struct ReportJson {
    horizon_minutes: usize,
    reference_window: usize,
    valid_count: usize,
    valid_range: Option<[usize; 2]>,
    methods: IndexMap<&'static str, MethodJson>,
}

impl EvalReport {
    fn to_json_view(&self, step_minutes: u32) -> ReportJson {
        ReportJson {
            horizon_minutes: self.horizon.delta_t() * step_minutes as usize,
            reference_window: self.reference_window,
            valid_count: self.valid_count,
            valid_range: self.valid_range.as_ref().map(|r| [*r.start(), *r.end()]),
            methods: self
                .sse
                .iter()
                .map(|(&m, &sse)| {
                    let gain_percent = if m == Method::Pe {
                        None
                    } else {
                        self.gain_percent.get(&m).copied()
                    };
                    (m.label(), MethodJson { sse, gain_percent })
                })
                .collect(),
        }
    }
}

/// Serializes reports as a pretty-printed JSON array.
pub fn reports_to_json(reports: &[EvalReport], step_minutes: u32) -> String {
    let views: Vec<_> = reports.iter().map(|r| r.to_json_view(step_minutes)).collect();
    let mut s = serde_json::to_string_pretty(&views).expect("report serialization");
    s.push('\n');
    s
}

/// `2.08e+06` style: three significant digits, signed two-digit exponent.
fn sci3(x: f64) -> String {
    if x == 0.0 {
        return "0.00e+00".into();
    }
    let s = format!("{x:.2e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn gain_cell(g: Gain) -> String {
    match g {
        Gain::Finite(v) => format!("[{v:.0}%]"),
        Gain::Infinite => "[inf]".into(),
    }
}

/// Aligned text table, one row per horizon, one column per method.
pub fn reports_to_table(reports: &[EvalReport], step_minutes: u32) -> String {
    let mut out = String::from("Sum of squared errors vs centered trend\n");
    let Some(first) = reports.first() else {
        return out;
    };
    let methods: Vec<Method> = first.sse.keys().copied().collect();
    let with_gain = first.gain_percent.contains_key(&Method::Pe);

    let mut header = format!("{:<12}", "Horizon");
    for m in &methods {
        let label = if with_gain && *m != Method::Pe {
            format!("{m} [gain in %]")
        } else {
            m.label().to_string()
        };
        let _ = write!(header, "{label:<24}");
    }
    out.push_str(header.trim_end());
    out.push('\n');
    for r in reports {
        let mut row = format!("{:<12}", format!("t+{}min", r.horizon.delta_t() * step_minutes as usize));
        for m in &methods {
            let mut cell = sci3(r.sse[m]);
            if *m != Method::Pe {
                if let Some(g) = r.gain_percent.get(m) {
                    cell = format!("{cell} {}", gain_cell(*g));
                }
            }
            let _ = write!(row, "{cell:<24}");
        }
        out.push_str(row.trim_end());
        out.push('\n');
    }
    if !with_gain {
        out.push_str("gains omitted: Pe not among the evaluated methods\n");
    }
    out
}

fn canonical_methods(methods: &[Method]) -> Vec<Method> {
    Method::ALL
        .iter()
        .copied()
        .filter(|m| methods.contains(m))
        .collect()
}

fn report_for(
    series: &TimeSeries,
    reference: &DerivedSeries,
    methods: &[Method],
    dt: Horizon,
    params: &EvalParams,
) -> Result<EvalReport> {
    let runs = methods
        .iter()
        .map(|&m| run_forecaster(series, m, dt, &params.forecast))
        .collect::<Result<Vec<_>>>()?;
    let mask = joint_mask(&runs, reference, dt);
    let valid_count = mask.iter().filter(|&&m| m).count();
    if valid_count == 0 {
        return Err(Error::EmptyRun(format!("no jointly valid index at horizon {dt}")));
    }
    let first = mask.iter().position(|&m| m);
    let last = mask.iter().rposition(|&m| m);

    let mut sse = IndexMap::new();
    for run in &runs {
        sse.insert(run.method, sse_vs_trend(run, reference, &mask)?);
    }
    let mut gain = IndexMap::new();
    if let Some(&pe) = sse.get(&Method::Pe) {
        for (&m, &s) in &sse {
            gain.insert(m, gain_percent(pe, s)?);
        }
    }
    Ok(EvalReport {
        horizon: dt,
        reference_window: params.reference_window,
        sse,
        gain_percent: gain,
        valid_count,
        valid_range: first.zip(last).map(|(a, b)| a..=b),
        mask,
    })
}

/// One report per horizon; every method in a report is scored on the same
/// indices.
pub fn build_report(
    series: &TimeSeries,
    methods: &[Method],
    horizons: &[Horizon],
    params: &EvalParams,
) -> Result<Vec<EvalReport>> {
    if horizons.is_empty() {
        return Ok(Vec::new());
    }
    let methods = canonical_methods(methods);
    if methods.is_empty() {
        return Err(Error::Param("no methods requested".into()));
    }
    let reference = centered_mean(series, params.reference_window)?;
    exec::map(horizons, |&dt| report_for(series, &reference, &methods, dt, params))
        .into_iter()
        .collect()
}
