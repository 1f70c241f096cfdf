//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line; run with
//! `cargo test -p trendcast --test acceptance -- --nocapture`.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{oracle_sse, population_std, rel};
use trendcast::eval::EvalParams;
use trendcast::forecast::{mixed_slope, DayOffset};
use trendcast::synth::TrafficScenario;
use trendcast::trend::mean;
use trendcast::{
    build_report, causal_mean, centered_mean, decompose, fit_affine, gain_percent, generate,
    reference_dataset, reference_scenario, rolling_volatility, run_forecaster, slope_series,
    ForecastParams, Horizon, MeanKind, Method,
};

fn verdict(id: u32, name: &str, ok: bool, detail: String) {
    println!("[{}] C{id:02} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

/// Best of several timed runs, to keep scheduler noise out of runtime limits.
fn best_time<R>(reps: usize, mut f: impl FnMut() -> R) -> Duration {
    (0..reps)
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(f());
            t.elapsed()
        })
        .min()
        .unwrap()
}

#[test]
fn c01_affine_exactness() {
    let y: Vec<f64> = (0..100).map(|k| 3.0 + 2.0 * k as f64).collect();
    let fit = fit_affine(&y, 1.0).unwrap();
    let (es, el) = (rel(fit.slope_per_minute, 2.0), rel(fit.level_at_end, 201.0));
    let elapsed = best_time(20, || fit_affine(&y, 1.0).unwrap());
    verdict(
        1,
        "affine exactness",
        es <= 1e-9 && el <= 1e-9 && elapsed < Duration::from_millis(1),
        format!("slope rel err {es:.1e}, level rel err {el:.1e}, {elapsed:?}"),
    );
}

#[test]
fn c02_least_squares_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let windows: Vec<Vec<f64>> = (0..1000)
        .map(|_| (0..100).map(|_| rng.random::<f64>()).collect())
        .collect();
    let start = Instant::now();
    let slopes: Vec<f64> = windows
        .iter()
        .map(|w| fit_affine(w, 1.0).unwrap().slope_per_minute)
        .collect();
    let elapsed = start.elapsed();
    let worst = windows
        .iter()
        .zip(&slopes)
        .map(|(w, &s)| rel(s, common::ls_slope(w, 1.0)))
        .fold(0.0, f64::max);
    verdict(
        2,
        "least-squares oracle",
        worst <= 1e-10 && elapsed < Duration::from_secs(1),
        format!("worst rel err {worst:.1e} over 1000 windows, {elapsed:?}"),
    );
}

#[test]
fn c03_scaled_persistence_periodic_exactness() {
    let scenario = TrafficScenario {
        days: 4,
        noise_std: 0.0,
        congestion_events: vec![],
        ..reference_scenario()
    };
    let series = generate(&scenario).unwrap();
    let trend = causal_mean(&series, 100).unwrap();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for dt in Horizon::defaults() {
        let run = run_forecaster(&series, Method::Pe, dt, &ForecastParams::default()).unwrap();
        for i in run.valid_indices() {
            let target = trend.get(i + dt.delta_t()).unwrap();
            worst = worst.max((run.predicted[i] - target).abs());
            checked += 1;
        }
    }
    verdict(
        3,
        "scaled-persistence periodic exactness",
        worst <= 1e-9 && checked > 0,
        format!("max |Q_Pe(t+dt) - E100(t+dt)| = {worst:.1e} over {checked} points"),
    );
}

#[test]
fn c04_mixed_slope_minimality() {
    let series = reference_dataset();
    let trend = causal_mean(&series, 100).unwrap();
    let slope = slope_series(&series, 100).unwrap();
    let day = DayOffset::default();
    let mut violations = 0;
    let mut checked = 0;
    for dt in Horizon::defaults() {
        let run = run_forecaster(&series, Method::Mi, dt, &ForecastParams::default()).unwrap();
        for i in run.valid_indices() {
            let m = mixed_slope(&trend, &slope, i, dt, day, 0.5).unwrap();
            let min = m.algebraic.abs().min(m.persistence.abs());
            let reproduced = trend.get(i).unwrap() + m.applied * dt.delta_t() as f64;
            if m.applied.abs() != min || reproduced != run.predicted[i] {
                violations += 1;
            }
            checked += 1;
        }
    }
    verdict(
        4,
        "mixed-slope minimality",
        violations == 0 && checked > 0,
        format!("{violations} violations over {checked} valid points"),
    );
}

#[test]
fn c05_table_gain_arithmetic() {
    let rows = [
        (2.08e6, 1.01e6, 105.0),
        (2.64e6, 1.7335e6, 52.0),
        (1.15e7, 8.47e6, 36.0),
        (2.08e6, 8.75e5, 137.0),
        (2.64e6, 1.23e6, 114.0),
        (1.15e7, 4.29e6, 169.0),
    ];
    let mut worst = 0.0f64;
    let mut got = Vec::new();
    for (pe, m, published) in rows {
        let g = gain_percent(pe, m).unwrap().value();
        worst = worst.max((g - published).abs());
        got.push(format!("{g:.1}"));
    }
    verdict(
        5,
        "published gain arithmetic",
        worst <= 2.0,
        format!("gains [{}], worst deviation {worst:.2} pp", got.join(", ")),
    );
}

/// Oracle SSE values on the reference month, computed once by
/// `common::oracle_sse` and frozen: (horizon, Pe, Al, Mi).
const GOLDEN_SSE: [(usize, f64, f64, f64); 3] = [
    (5, 1.0421739333471928e6, 1.0299789647441017e6, 1.058225657589419e6),
    (15, 1.059915401274917e6, 1.0598119883751557e6, 1.1148274621843477e6),
    (60, 1.150800890225293e6, 2.460302053347456e6, 1.9271368586551698e6),
];

fn reference_reports() -> (Vec<trendcast::EvalReport>, Duration) {
    let series = reference_dataset();
    let start = Instant::now();
    let reports = build_report(
        &series,
        &[Method::Pe, Method::Al, Method::Mi],
        &Horizon::defaults(),
        &EvalParams::default(),
    )
    .unwrap();
    (reports, start.elapsed())
}

#[test]
fn c06a_golden_sse() {
    let (reports, elapsed) = reference_reports();
    let series = reference_dataset();
    let mut worst = 0.0f64;
    for (r, &(dt, pe, al, mi)) in reports.iter().zip(&GOLDEN_SSE) {
        assert_eq!(r.horizon.delta_t(), dt);
        for (m, golden) in [(Method::Pe, pe), (Method::Al, al), (Method::Mi, mi)] {
            worst = worst.max(rel(r.sse[&m], golden));
        }
        // The frozen values must still be what the oracle computes.
        let o = oracle_sse(series.values(), dt);
        assert_eq!(o.count, r.valid_count);
        worst = worst.max(rel(o.pe, pe)).max(rel(o.al, al)).max(rel(o.mi, mi));
    }
    verdict(
        6,
        "golden SSE values",
        worst <= 1e-6 && elapsed < Duration::from_secs(10),
        format!("worst rel deviation {worst:.1e}, evaluation {elapsed:?}"),
    );
}

#[test]
fn c06b_method_ordering() {
    let (reports, _) = reference_reports();
    let mut ok = true;
    let mut detail = Vec::new();
    for r in &reports {
        let (pe, al, mi) = (r.sse[&Method::Pe], r.sse[&Method::Al], r.sse[&Method::Mi]);
        let dt = r.horizon.delta_t();
        let holds = if dt == 5 { mi <= pe } else { mi <= al && al <= pe };
        ok &= holds;
        detail.push(format!(
            "h{dt}: Pe {pe:.4e} Al {al:.4e} Mi {mi:.4e} {}",
            if holds { "ok" } else { "violated" }
        ));
    }
    verdict(6, "method ordering Mi <= Al <= Pe", ok, detail.join("; "));
}

#[test]
fn c07_decomposition_identity() {
    let series = reference_dataset();
    let mut worst_ulps = 0.0f64;
    for kind in [MeanKind::Causal, MeanKind::Centered] {
        let d = decompose(&series, kind, 100).unwrap();
        for i in d.valid_range() {
            let x = series.values()[i];
            let t = d.trend.get(i).unwrap();
            let r = t + d.fluctuation.get(i).unwrap();
            let ulp = f64::EPSILON * x.abs().max(t.abs()).max(f64::MIN_POSITIVE);
            worst_ulps = worst_ulps.max((r - x).abs() / ulp);
        }
    }
    verdict(
        7,
        "decomposition identity",
        worst_ulps <= 1.0,
        format!("worst reconstruction error {worst_ulps} ulp"),
    );
}

#[test]
fn c08_volatility_oracle_and_invariances() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let random: Vec<f64> = (0..50_000).map(|_| rng.random_range(0.0..50.0)).collect();
    let rs = trendcast::TimeSeries::from_values(random.clone()).unwrap();
    let vol = rolling_volatility(&rs, 100, MeanKind::Causal).unwrap();
    let mut oracle_err = 0.0f64;
    for _ in 0..1000 {
        let i = rng.random_range(99..random.len());
        oracle_err = oracle_err.max(rel(vol.values.get(i).unwrap(), population_std(&random[i - 99..=i])));
    }

    let series = reference_dataset();
    let (mut scale_err, mut shift_err) = (0.0f64, 0.0f64);
    for kind in [MeanKind::Causal, MeanKind::Centered] {
        for n in [100, 250, 500] {
            let base = rolling_volatility(&series, n, kind).unwrap();
            for c in [-3.5, 0.25, 7.0] {
                let scaled = rolling_volatility(&series.map(|x| c * x).unwrap(), n, kind).unwrap();
                for (s, b) in scaled.values.values().iter().zip(base.values.values()) {
                    scale_err = scale_err.max(rel(*s, c.abs() * b));
                }
            }
            for c in [-5.0, 1.0, 100.0] {
                let shifted = rolling_volatility(&series.map(|x| x + c).unwrap(), n, kind).unwrap();
                for (s, b) in shifted.values.values().iter().zip(base.values.values()) {
                    shift_err = shift_err.max(rel(*s, *b));
                }
            }
        }
    }
    verdict(
        8,
        "volatility oracle and invariances",
        oracle_err <= 1e-10 && scale_err <= 1e-12 && shift_err <= 1e-12,
        format!("oracle {oracle_err:.1e}, scale {scale_err:.1e}, shift {shift_err:.1e} (relative)"),
    );
}

#[test]
fn c09_volatility_scale_monotonicity() {
    let series = reference_dataset();
    let windows = [100, 250, 500];
    // Compare every scale over the range where the widest one is defined.
    let common = centered_mean(&series, 500).unwrap().valid_range();
    let mut trend_var = Vec::new();
    let mut vol_mean = Vec::new();
    for n in windows {
        let t = mean(&series, n, MeanKind::Centered).unwrap();
        let v: Vec<f64> = common.clone().map(|i| t.get(i).unwrap()).collect();
        let m = common::naive_mean(&v);
        trend_var.push(v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64);
        let vol = rolling_volatility(&series, n, MeanKind::Centered).unwrap();
        let vv: Vec<f64> = common.clone().map(|i| vol.values.get(i).unwrap()).collect();
        vol_mean.push(common::naive_mean(&vv));
    }
    let smoother = trend_var.windows(2).all(|w| w[1] < w[0]);
    let rising = vol_mean.windows(2).all(|w| w[1] >= w[0]);
    verdict(
        9,
        "trend smoothing and volatility increase with scale",
        smoother && rising,
        format!("trend variance {trend_var:.3?}, mean volatility {vol_mean:.3?}"),
    );
}

#[test]
fn c10_eval_is_deterministic() {
    let scenario = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/reference.json");
    let run = |threads: Option<&str>| {
        let dir = tempfile::tempdir().unwrap();
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_trendcast"));
        cmd.arg("eval").arg("--synth").arg(&scenario).arg("--out").arg(dir.path());
        if let Some(t) = threads {
            cmd.env("TRENDCAST_THREADS", t);
        }
        let status = cmd.output().unwrap().status;
        assert!(status.success());
        std::fs::read(dir.path().join("report.json")).unwrap()
    };
    let (a, b, single) = (run(None), run(None), run(Some("1")));
    verdict(
        10,
        "end-to-end determinism",
        a == b && a == single && !a.is_empty(),
        format!("{} byte report, repeated and single-threaded runs identical: {}", a.len(), a == b && a == single),
    );
}
