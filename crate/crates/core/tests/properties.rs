//! Property tests for the deterministic facts the solvers lean on. Systems
//! are generated from fuzzed model parameters (seeds, shapes, corruption
//! levels) so every case is reproducible from its inputs.

use proptest::prelude::*;

use qrk_core::linalg::{dot, norm, project_row};
use qrk_core::problem::{
    build_system, generate_matrix, make_consistent_rhs, CorruptionModel, MatrixKind, MatrixModel,
};
use qrk_core::{quantile, smallest_singular_value};

fn model(kind: MatrixKind, rows: usize, cols: usize, seed: u64) -> MatrixModel {
    MatrixModel {
        kind,
        rows,
        cols,
        seed,
    }
}

fn any_kind() -> impl Strategy<Value = MatrixKind> {
    prop_oneof![
        Just(MatrixKind::GaussianNormalized),
        Just(MatrixKind::CoherentUniform),
        Just(MatrixKind::BernoulliNormalized),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantile_is_monotone_in_q(
        values in prop::collection::vec(0.0..1e6f64, 1..50),
        q1 in 0.001..1.0f64,
        q2 in 0.001..1.0f64,
    ) {
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        prop_assert!(quantile(&values, lo).unwrap() <= quantile(&values, hi).unwrap());
    }

    #[test]
    fn residual_quantile_is_lipschitz_in_the_iterate(
        seed in 0u64..1000,
        m in 5usize..60,
        n in 2usize..6,
        q in 0.05..1.0f64,
        x in prop::collection::vec(-10.0..10.0f64, 6),
        y in prop::collection::vec(-10.0..10.0f64, 6),
    ) {
        // Unit rows make each residual 1-Lipschitz in x, and order
        // statistics inherit the uniform bound.
        let a = generate_matrix(&model(MatrixKind::GaussianNormalized, m, n, seed)).unwrap();
        let (_, b) = make_consistent_rhs(&a, seed);
        let x = &x[..n];
        let y = &y[..n];
        let res = |p: &[f64]| -> Vec<f64> {
            (0..m).map(|i| (dot(a.row(i).unwrap(), p).unwrap() - b[i]).abs()).collect()
        };
        let qx = quantile(&res(x), q).unwrap();
        let qy = quantile(&res(y), q).unwrap();
        let dist = norm(&x.iter().zip(y).map(|(u, v)| u - v).collect::<Vec<_>>());
        prop_assert!((qx - qy).abs() <= dist + 1e-9);
    }

    #[test]
    fn projection_is_idempotent_and_non_expansive(
        seed in 0u64..1000,
        row in 0usize..20,
        x in prop::collection::vec(-10.0..10.0f64, 4),
    ) {
        let a = generate_matrix(&model(MatrixKind::GaussianNormalized, 20, 4, seed)).unwrap();
        let (x_star, b) = make_consistent_rhs(&a, seed);
        let ai = a.row(row).unwrap();
        let x1 = project_row(&x, ai, b[row]).unwrap();
        let x2 = project_row(&x1, ai, b[row]).unwrap();
        let drift = norm(&x1.iter().zip(x2.iter()).map(|(u, v)| u - v).collect::<Vec<_>>());
        prop_assert!(drift <= 1e-12 * (1.0 + norm(&x1)));

        // x_star lies on every row's hyperplane of a consistent system.
        let d_before = norm(&x.iter().zip(x_star.iter()).map(|(u, v)| u - v).collect::<Vec<_>>());
        let d_after = norm(&x1.iter().zip(x_star.iter()).map(|(u, v)| u - v).collect::<Vec<_>>());
        prop_assert!(d_after <= d_before * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn sigma_min_is_a_lower_bound_on_rayleigh_quotients(
        kind in any_kind(),
        seed in 0u64..1000,
        m in 6usize..40,
        n in 2usize..6,
        v in prop::collection::vec(-1.0..1.0f64, 6),
    ) {
        let a = generate_matrix(&model(kind, m, n, seed)).unwrap();
        let sigma = smallest_singular_value(&a).unwrap();
        let v = &v[..n];
        let scale = norm(v);
        prop_assume!(scale > 1e-3);
        let unit: Vec<f64> = v.iter().map(|c| c / scale).collect();
        let av = a.mul_vec(&unit).unwrap();
        prop_assert!(sigma <= norm(&av) + 1e-7);
    }

    #[test]
    fn corrupted_quantile_is_sandwiched_by_clean_quantiles(
        seed in 0u64..1000,
        m in 20usize..80,
        n in 2usize..6,
        beta in 0.0..0.35f64,
        q in 0.05..1.0f64,
        offset in prop::collection::vec(-5.0..5.0f64, 6),
        scale in -2.0..2.0f64,
    ) {
        let sys = build_system(
            &model(MatrixKind::GaussianNormalized, m, n, seed),
            &CorruptionModel::uniform(beta, 10.0),
        ).unwrap();
        let b = sys.beta;
        prop_assume!((q - b) * m as f64 >= 1.0 && q + b <= 1.0);
        let lambda = 10f64.powf(scale);
        let x: Vec<f64> = sys.x_star.iter().zip(&offset).map(|(s, d)| s + lambda * d).collect();
        let mid = quantile(&sys.residual_magnitudes(&x), q).unwrap();
        let lo = quantile(&sys.clean_residual_magnitudes(&x), q - b).unwrap();
        let hi = quantile(&sys.clean_residual_magnitudes(&x), q + b).unwrap();
        prop_assert!(lo <= mid && mid <= hi, "{lo} <= {mid} <= {hi} violated");
    }

    #[test]
    fn mean_bounds_the_exceedance_count(
        kind in any_kind(),
        seed in 0u64..1000,
        m in 5usize..80,
        n in 2usize..6,
        alpha in 0.01..1.0f64,
        x in prop::collection::vec(-10.0..10.0f64, 6),
    ) {
        let a = generate_matrix(&model(kind, m, n, seed)).unwrap();
        let x = &x[..n];
        let r: Vec<f64> = (0..m).map(|i| dot(a.row(i).unwrap(), x).unwrap().abs()).collect();
        let mean = r.iter().sum::<f64>() / m as f64;
        prop_assume!(mean > 0.0);
        let count = r.iter().filter(|&&v| v > mean / alpha).count();
        prop_assert!((count as f64) < alpha * m as f64);
    }

    #[test]
    fn generation_is_byte_deterministic(
        kind in any_kind(),
        seed in 0u64..1000,
        m in 4usize..30,
        n in 2usize..5,
        beta in 0.0..0.4f64,
    ) {
        let mm = model(kind, m, n, seed);
        let cm = CorruptionModel::uniform(beta, 5.0);
        let s1 = build_system(&mm, &cm).unwrap();
        let s2 = build_system(&mm, &cm).unwrap();
        let bits = |v: &[f64]| v.iter().map(|f| f.to_bits()).collect::<Vec<_>>();
        for i in 0..m {
            prop_assert_eq!(bits(s1.a.row(i).unwrap()), bits(s2.a.row(i).unwrap()));
        }
        prop_assert_eq!(bits(&s1.b), bits(&s2.b));
        prop_assert_eq!(bits(&s1.x_star), bits(&s2.x_star));
        prop_assert_eq!(&s1.corrupt_support, &s2.corrupt_support);
    }
}
