use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use coupled_bench::{cauchy, cauchy_draw};
use coupled_stats::dist::{self, CoupledParams};
use coupled_stats::entropy::coupled_entropy;
use coupled_stats::estimators::{generalized_mean_scale, geometric_mean_scale};
use coupled_stats::fitting::cvm_statistic;
use coupled_stats::special::Coupling;

fn density_and_cdf(c: &mut Criterion) {
    let p = cauchy();
    c.bench_function("pdf", |b| b.iter(|| dist::pdf(&p, black_box(1.7)).unwrap()));
    c.bench_function("cdf_closed_form", |b| {
        b.iter(|| dist::cdf(&p, black_box(1.7)).unwrap())
    });
    let general = CoupledParams::new(0.0, 1.0, 0.5, 1.5).unwrap();
    c.bench_function("cdf_quadrature", |b| {
        b.iter(|| dist::cdf(&general, black_box(1.7)).unwrap())
    });
}

fn sampling(c: &mut Criterion) {
    let p = cauchy();
    c.bench_function("sample_10k", |b| {
        b.iter(|| dist::sample(&p, 10_000, black_box(7)).unwrap())
    });
}

fn estimators(c: &mut Criterion) {
    let samples = cauchy_draw(100_000);
    let k = Coupling::new(1.0).unwrap();
    let k2 = Coupling::new(0.25).unwrap();
    c.bench_function("geometric_mean_scale_100k", |b| {
        b.iter(|| geometric_mean_scale(black_box(&samples), k).unwrap())
    });
    c.bench_function("generalized_mean_scale_100k", |b| {
        b.iter(|| generalized_mean_scale(black_box(&samples), k2).unwrap())
    });
}

fn goodness_of_fit(c: &mut Criterion) {
    let samples = cauchy_draw(10_000);
    let p = cauchy();
    c.bench_function("cvm_statistic_10k", |b| {
        b.iter(|| cvm_statistic(black_box(&samples), &p).unwrap())
    });
}

fn entropy_quadrature(c: &mut Criterion) {
    let p = cauchy();
    c.bench_function("coupled_entropy", |b| {
        b.iter(|| coupled_entropy(black_box(&p)).unwrap())
    });
}

criterion_group!(
    benches,
    density_and_cdf,
    sampling,
    estimators,
    goodness_of_fit,
    entropy_quadrature
);
criterion_main!(benches);
