use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use trendcast::eval::EvalParams;
use trendcast::{
    build_report, causal_mean, exec, reference_dataset, rolling_volatility, slope_series, Horizon,
    MeanKind, Method, TimeSeries,
};

fn modes<F: Fn() -> R, R>(c: &mut Criterion, name: &str, f: F) {
    let mut group = c.benchmark_group(name);
    group.bench_function(BenchmarkId::from_parameter("parallel"), |b| b.iter(|| black_box(f())));
    group.bench_function(BenchmarkId::from_parameter("sequential"), |b| {
        b.iter(|| exec::sequential(|| black_box(f())))
    });
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let s: TimeSeries = reference_dataset();
    modes(c, "causal_mean_100", || causal_mean(&s, 100).unwrap());
    modes(c, "slope_series_100", || slope_series(&s, 100).unwrap());
    modes(c, "volatility_500", || rolling_volatility(&s, 500, MeanKind::Centered).unwrap());
}

fn report(c: &mut Criterion) {
    let s = reference_dataset();
    let methods = [Method::Pe, Method::Al, Method::Mi];
    let horizons = Horizon::defaults();
    let params = EvalParams::default();
    let mut group = c.benchmark_group("build_report");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(build_report(&s, &methods, &horizons, &params).unwrap()))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| exec::sequential(|| black_box(build_report(&s, &methods, &horizons, &params).unwrap())))
    });
    group.finish();
}

criterion_group!(benches, kernels, report);
criterion_main!(benches);
