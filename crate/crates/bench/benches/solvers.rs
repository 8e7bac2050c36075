use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qrk_bench::bench_system;
use qrk_core::solvers::{
    opt_sgd_step_size, quantile_rk_iteration, quantile_sgd_iteration, solve, solver_rng,
    QuantileEstimator, SolverConfig, ThresholdRule,
};

/// Per-iteration cost of the gated projection at the desk scale
/// (2000x100, 400 sampled residuals per threshold).
fn iteration_throughput(c: &mut Criterion) {
    let system = bench_system(2000, 100, 0.2);
    let x = vec![0.25f64; 100];
    let mut group = c.benchmark_group("iteration");

    group.bench_function("quantile_rk_t400", |bench| {
        let mut estimator = QuantileEstimator::new(ThresholdRule::FreshSample { t: 400 });
        let mut rng = solver_rng(1);
        bench.iter(|| {
            quantile_rk_iteration(
                black_box(&x),
                &system.a,
                &system.b,
                0.7,
                &mut estimator,
                &mut rng,
            )
            .unwrap()
        })
    });

    group.bench_function("quantile_sgd_t400", |bench| {
        let mut estimator = QuantileEstimator::new(ThresholdRule::FreshSample { t: 400 });
        let mut rng = solver_rng(2);
        bench.iter(|| {
            quantile_sgd_iteration(
                black_box(&x),
                &system.a,
                &system.b,
                0.5,
                &mut estimator,
                &mut rng,
            )
            .unwrap()
        })
    });

    // The exact step size scans all m rows, which is why the stochastic
    // methods exist; this pins the gap.
    group.bench_function("opt_sgd_step_size", |bench| {
        bench.iter(|| {
            opt_sgd_step_size(black_box(&x), &system.a, &system.b, &system.x_star).unwrap()
        })
    });
    group.finish();
}

/// Whole-run cost at a small scale, trace included.
fn full_solve(c: &mut Criterion) {
    let system = bench_system(500, 20, 0.2);
    c.bench_function("solve_quantile_rk_500x20_1000it", |bench| {
        bench.iter(|| {
            let config = SolverConfig::quantile_rk(0.7, 1000, 7);
            solve(&system.a, &system.b, &config, Some(black_box(&system.x_star))).unwrap()
        })
    });
}

criterion_group!(benches, iteration_throughput, full_solve);
criterion_main!(benches);
