use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pathwise::follmer::{follmer_residual, TestFunction};
use pathwise::partition::{make_dyadic, make_rho, make_sigma};
use pathwise::qv::qv_stopped_sum;
use pathwise::zigzag_lab::{count_formula, geometric_count, l_alpha_series};
use pathwise::{make_named_path, make_random_walk};

fn series(c: &mut Criterion) {
    c.bench_function("l_alpha_series/1e5", |b| {
        b.iter(|| l_alpha_series(black_box(0.5), 100_000))
    });
    c.bench_function("count_formula/1e5", |b| {
        b.iter(|| count_formula(black_box(100_000), 0.0))
    });
}

fn partitions(c: &mut Criterion) {
    c.bench_function("make_rho/1e4", |b| {
        b.iter(|| make_rho(black_box(10_000), 0.0))
    });
    c.bench_function("geometric_count/1e4", |b| {
        b.iter(|| geometric_count(black_box(10_000), 0.25))
    });
    c.bench_function("make_sigma/1e4", |b| {
        b.iter(|| make_sigma(black_box(10_001)))
    });
}

fn sums(c: &mut Criterion) {
    let z = make_named_path("z").unwrap();
    let rho = make_rho(10_000, 0.0).unwrap();
    c.bench_function("qv_stopped_sum/z/rho1e4", |b| {
        b.iter(|| qv_stopped_sum(&z, black_box(&rho), 1.0))
    });
    let walk = make_random_walk(1 << 12, 1.0, 1).unwrap();
    let dyadic = make_dyadic(1.0, 12).unwrap();
    let f = TestFunction::exp();
    c.bench_function("follmer_residual/walk4096/exp", |b| {
        b.iter(|| follmer_residual(&walk, black_box(&dyadic), &f, 0.1))
    });
}

criterion_group!(benches, series, partitions, sums);
criterion_main!(benches);
