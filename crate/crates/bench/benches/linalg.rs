use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qrk_bench::bench_system;
use qrk_core::problem::{generate_matrix, MatrixKind, MatrixModel};
use qrk_core::{quantile, smallest_singular_value};

/// Order-statistic selection over the multiset sizes the solvers use.
fn quantile_selection(c: &mut Criterion) {
    let mut group = c.benchmark_group("quantile");
    for size in [1_000usize, 10_000, 100_000] {
        let values: Vec<f64> = (0..size)
            .map(|i| ((i as f64) * 0.7548776662466927).fract())
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(size), &values, |bench, v| {
            bench.iter(|| quantile(black_box(v), 0.7).unwrap())
        });
    }
    group.finish();
}

/// Smallest singular value via the Gram-matrix eigensolve; the diagnostics
/// lean on this for conditioning reports.
fn sigma_min(c: &mut Criterion) {
    let system = bench_system(1000, 50, 0.0);
    c.bench_function("sigma_min_1000x50", |bench| {
        bench.iter(|| smallest_singular_value(black_box(&system.a)).unwrap())
    });
}

fn generation(c: &mut Criterion) {
    c.bench_function("generate_gaussian_2000x100", |bench| {
        bench.iter(|| {
            generate_matrix(black_box(&MatrixModel {
                kind: MatrixKind::GaussianNormalized,
                rows: 2000,
                cols: 100,
                seed: 5,
            }))
            .unwrap()
        })
    });
}

criterion_group!(benches, quantile_selection, sigma_min, generation);
criterion_main!(benches);
