use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kaczeros::{
    count_real_zeros, expected_zeros, moment_triple, sample, RegionSpec, RootCountConfig,
};
use kaczeros_bench::{coefficient_batch, evaluation_points, models};

fn moments(c: &mut Criterion) {
    let mut group = c.benchmark_group("moment_triple");
    for n in [64usize, 1024, 16_384] {
        for (name, model) in models() {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| {
                    for x in evaluation_points() {
                        black_box(moment_triple(black_box(x), n, model).unwrap());
                    }
                })
            });
        }
    }
    group.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("expected_zeros");
    group.sample_size(10);
    for n in [16usize, 256] {
        for (name, model) in models() {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| black_box(expected_zeros(n, model, RegionSpec::All, 1e-8).unwrap()))
            });
        }
    }
    group.finish();
}

fn root_counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_real_zeros");
    let config = RootCountConfig::default();
    let eigen_only = RootCountConfig {
        cross_check: false,
        ..RootCountConfig::default()
    };
    for n in [16usize, 128] {
        let polys = coefficient_batch(n, kaczeros::CoefficientModel::fractional(0.75).unwrap(), 8);
        group.bench_with_input(BenchmarkId::new("cross_checked", n), &polys, |b, polys| {
            b.iter(|| {
                for p in polys {
                    black_box(count_real_zeros(p, &config).unwrap());
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("eigen_only", n), &polys, |b, polys| {
            b.iter(|| {
                for p in polys {
                    black_box(count_real_zeros(p, &eigen_only).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample");
    for n in [128usize, 4096] {
        for (name, model) in models() {
            let mut trial = 0u64;
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| {
                    trial += 1;
                    black_box(sample(n, model, 3, trial).unwrap())
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, moments, quadrature, root_counting, sampling);
criterion_main!(benches);
