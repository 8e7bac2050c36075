use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot_unchecked, quantile, smallest_singular_value, DenseMatrix};
use crate::problem::{unit_sphere_vector, CorruptedSystem};
use crate::rng::{role_rng, StreamRole};
use crate::solvers::opt_sgd_step_size;

/// Desk-scale empirical checks of the probabilistic claims behind the
/// methods. Each check returns a serializable report with a pass flag;
/// thresholds are deliberately loose where only Monte Carlo evidence exists,
/// and exact where the underlying fact is deterministic.

fn probe_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    role_rng(seed, StreamRole::Probe)
}

/// ceil(alpha * m) with a nudge so decimal alphas on round row counts do not
/// gain a phantom row to the floating-point representation.
fn subset_size(alpha: f64, m: usize) -> usize {
    ((alpha * m as f64 - 1e-9).ceil() as usize).clamp(1, m)
}

// ---------------------------------------------------------------------------
// Submatrix conditioning

#[derive(Debug, Clone, Serialize)]
pub struct SubmatrixReport {
    pub alpha: f64,
    pub subset_rows: usize,
    pub trials: usize,
    pub random_min_sigma: f64,
    pub random_min_ratio: f64,
    pub probed_min_sigma: f64,
    pub probed_min_ratio: f64,
    pub pass: bool,
}

/// Estimates how badly conditioned a size-ceil(alpha m) row submatrix can
/// get. Random subsets give the typical picture; adversarial subsets (the
/// rows most orthogonal to a probe direction) hunt for the worst case, which
/// for structured matrices can be singular even though random subsets look
/// healthy. Ratios are against sqrt(m/n), the natural scale for unit-row
/// matrices. The pass flag covers the random subsets only; probe results are
/// reported for inspection.
pub fn check_submatrix_conditioning(
    a: &DenseMatrix,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<SubmatrixReport> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(Error::BadDomain {
            reason: format!("alpha must lie in (0,1], got {alpha}"),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidConfig {
            reason: "need at least one trial".into(),
        });
    }
    let (m, n) = (a.nrows(), a.ncols());
    let k = subset_size(alpha, m);
    if k < n {
        return Err(Error::SubmatrixNotTall { subset: k, cols: n });
    }
    let scale = (m as f64 / n as f64).sqrt();
    let mut rng = probe_rng(seed);

    let mut random_min = f64::INFINITY;
    for _ in 0..trials {
        let subset = rand::seq::index::sample(&mut rng, m, k).into_vec();
        random_min = random_min.min(subset_sigma_min(a, &subset)?);
    }

    let mut probes: Vec<Vec<f64>> = (0..8)
        .map(|_| unit_sphere_vector(n, &mut rng).into_vec())
        .collect();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut pairs = 0;
    'outer: for i in 0..n {
        for j in (i + 1)..n {
            for sign in [-1.0, 1.0] {
                let mut v = vec![0.0; n];
                v[i] = inv_sqrt2;
                v[j] = sign * inv_sqrt2;
                probes.push(v);
            }
            pairs += 1;
            if pairs >= 16 {
                break 'outer;
            }
        }
    }

    let mut probed_min = f64::INFINITY;
    for v in &probes {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&p, &q| {
            let rp = dot_unchecked(a.row_unchecked(p), v).abs();
            let rq = dot_unchecked(a.row_unchecked(q), v).abs();
            rp.total_cmp(&rq)
        });
        order.truncate(k);
        probed_min = probed_min.min(subset_sigma_min(a, &order)?);
    }

    Ok(SubmatrixReport {
        alpha,
        subset_rows: k,
        trials,
        random_min_sigma: random_min,
        random_min_ratio: random_min / scale,
        probed_min_sigma: probed_min,
        probed_min_ratio: probed_min / scale,
        pass: random_min / scale > 0.0,
    })
}

fn subset_sigma_min(a: &DenseMatrix, subset: &[usize]) -> Result<f64> {
    let rows: Vec<Vec<f64>> = subset
        .iter()
        .map(|&i| a.row_unchecked(i).to_vec())
        .collect();
    smallest_singular_value(&DenseMatrix::from_rows(&rows)?)
}

// ---------------------------------------------------------------------------
// Quantile lower bound and the exceedance count

#[derive(Debug, Clone, Serialize)]
pub struct QuantileBoundsReport {
    pub q: f64,
    pub alpha: f64,
    pub trials: usize,
    pub skipped: usize,
    pub exceedance_violations: usize,
    pub min_normalized_quantile: f64,
    pub max_normalized_quantile: f64,
    pub pass: bool,
}

/// Over random unit directions x: (i) the count of rows with
/// |<a_i, x>| > M(x)/alpha stays strictly below alpha*m — a deterministic
/// consequence of the mean — and (ii) the q-quantile of |<a_i, x>|, scaled by
/// sqrt(n), stays bounded away from zero. Reports the observed range of (ii)
/// rather than asserting a constant nobody has pinned down.
pub fn check_quantile_bounds(
    a: &DenseMatrix,
    q: f64,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<QuantileBoundsReport> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(Error::BadDomain {
            reason: format!("alpha must lie in (0,1], got {alpha}"),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidConfig {
            reason: "need at least one trial".into(),
        });
    }
    let (m, n) = (a.nrows(), a.ncols());
    let mut rng = probe_rng(seed);
    let mut skipped = 0usize;
    let mut violations = 0usize;
    let mut min_q = f64::INFINITY;
    let mut max_q = f64::NEG_INFINITY;

    for _ in 0..trials {
        let x = unit_sphere_vector(n, &mut rng);
        let r: Vec<f64> = (0..m)
            .map(|i| dot_unchecked(a.row_unchecked(i), &x).abs())
            .collect();
        let mean = r.iter().sum::<f64>() / m as f64;
        if mean == 0.0 {
            skipped += 1;
            continue;
        }
        let cutoff = mean / alpha;
        let count = r.iter().filter(|&&v| v > cutoff).count();
        if count as f64 >= alpha * m as f64 {
            violations += 1;
        }
        let nq = quantile(&r, q)? * (n as f64).sqrt();
        min_q = min_q.min(nq);
        max_q = max_q.max(nq);
    }

    let evaluated = trials - skipped;
    Ok(QuantileBoundsReport {
        q,
        alpha,
        trials,
        skipped,
        exceedance_violations: violations,
        min_normalized_quantile: min_q,
        max_normalized_quantile: max_q,
        pass: evaluated > 0 && violations == 0 && min_q > 0.0,
    })
}

// ---------------------------------------------------------------------------
// Step-size oracle vs the computable mean residual

#[derive(Debug, Clone, Serialize)]
pub struct EtaReport {
    pub samples: usize,
    pub skipped: usize,
    pub max_relative_gap: f64,
    pub median_relative_gap: f64,
    pub pass: bool,
}

/// Loose Monte Carlo threshold for the step-size oracle gap; with no
/// corruption the gap is identically zero and it grows with the corrupted
/// fraction.
pub const ETA_GAP_TOLERANCE: f64 = 0.5;

/// Compares the oracle step size eta*(x) with the runtime-computable mean
/// absolute clean residual M(x - x_star) at unit-offset iterates
/// x = x_star + u. They agree except on corrupted rows whose residual sign
/// flipped, so the relative gap measures how much corruption distorts the
/// steering signal.
pub fn check_eta_approximation(
    system: &CorruptedSystem,
    samples: usize,
    seed: u64,
) -> Result<EtaReport> {
    if samples == 0 {
        return Err(Error::InvalidConfig {
            reason: "need at least one sample".into(),
        });
    }
    let n = system.cols();
    let mut rng = probe_rng(seed);
    let mut gaps = Vec::with_capacity(samples);
    let mut skipped = 0usize;
    for _ in 0..samples {
        let u = unit_sphere_vector(n, &mut rng);
        let x: Vec<f64> = system
            .x_star
            .iter()
            .zip(u.iter())
            .map(|(s, d)| s + d)
            .collect();
        let eta = opt_sgd_step_size(&x, &system.a, &system.b, &system.x_star)?;
        let clean = system.clean_residual_magnitudes(&x);
        let mean = clean.iter().sum::<f64>() / clean.len() as f64;
        if mean == 0.0 {
            skipped += 1;
            continue;
        }
        gaps.push((eta - mean).abs() / mean);
    }
    if gaps.is_empty() {
        return Err(Error::BadDomain {
            reason: "every sample was degenerate (M = 0)".into(),
        });
    }
    let max = gaps.iter().fold(0.0f64, |a, &b| a.max(b));
    let median = quantile(&gaps, 0.5)?;
    Ok(EtaReport {
        samples,
        skipped,
        max_relative_gap: max,
        median_relative_gap: median,
        pass: skipped == 0 && max < ETA_GAP_TOLERANCE,
    })
}

// ---------------------------------------------------------------------------
// Order-statistics sandwich

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub trials: usize,
    pub q_grid: Vec<f64>,
    pub violations: usize,
    pub pass: bool,
}

/// The computable quantile of the corrupted residuals is pinned between two
/// clean quantiles: Q_{q-beta} <= corrupted Q_q <= Q_{q+beta}, because at
/// most beta*m entries differ between the two multisets. This is an exact
/// order-statistics fact, so any violation is a bug, not bad luck. Checked at
/// random iterates over the q grid where both sides are defined.
pub fn check_quantile_sandwich(
    system: &CorruptedSystem,
    trials: usize,
    seed: u64,
) -> Result<SandwichReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig {
            reason: "need at least one trial".into(),
        });
    }
    let m = system.rows();
    let n = system.cols();
    let beta = system.beta;
    let q_grid: Vec<f64> = (1..20)
        .map(|i| i as f64 / 20.0)
        .filter(|q| (q - beta) * m as f64 >= 1.0 && q + beta <= 1.0)
        .collect();
    if q_grid.is_empty() {
        return Err(Error::BadDomain {
            reason: format!("no usable quantiles for beta = {beta} with {m} rows"),
        });
    }
    let mut rng = probe_rng(seed);
    let mut violations = 0usize;
    for _ in 0..trials {
        let u = unit_sphere_vector(n, &mut rng);
        // Exercise several error magnitudes around unit scale.
        let lambda = 10f64.powf(rng.random_range(-2.0..2.0));
        let x: Vec<f64> = system
            .x_star
            .iter()
            .zip(u.iter())
            .map(|(s, d)| s + lambda * d)
            .collect();
        let corrupted = system.residual_magnitudes(&x);
        let clean = system.clean_residual_magnitudes(&x);
        for &q in &q_grid {
            let mid = quantile(&corrupted, q)?;
            let lo = quantile(&clean, q - beta)?;
            let hi = quantile(&clean, q + beta)?;
            if !(lo <= mid && mid <= hi) {
                violations += 1;
            }
        }
    }
    Ok(SandwichReport {
        trials,
        q_grid,
        violations,
        pass: violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{build_system, CorruptionModel, MatrixKind, MatrixModel};

    fn model(kind: MatrixKind, m: usize, n: usize, seed: u64) -> MatrixModel {
        MatrixModel {
            kind,
            rows: m,
            cols: n,
            seed,
        }
    }

    #[test]
    fn alpha_one_reduces_to_the_full_matrix() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        let report = check_submatrix_conditioning(&a, 1.0, 3, 0).unwrap();
        let full = smallest_singular_value(&a).unwrap();
        assert_eq!(report.random_min_sigma, full);
        assert_eq!(report.subset_rows, 4);
        assert!(report.pass);
    }

    #[test]
    fn gaussian_submatrices_stay_well_conditioned() {
        let a = crate::problem::generate_matrix(&model(MatrixKind::GaussianNormalized, 400, 20, 7))
            .unwrap();
        let report = check_submatrix_conditioning(&a, 0.5, 200, 7).unwrap();
        assert_eq!(report.subset_rows, 200);
        assert!(report.random_min_ratio > 0.0);
        assert!(report.pass);
    }

    #[test]
    fn sign_matrix_probe_finds_a_singular_submatrix() {
        // Half the rows of a two-column sign matrix are orthogonal to
        // (1,-1)/sqrt(2); the probe collects them and the subset collapses to
        // rank one, while random subsets remain full rank.
        let a = crate::problem::generate_matrix(&model(MatrixKind::BernoulliNormalized, 400, 2, 3))
            .unwrap();
        let report = check_submatrix_conditioning(&a, 0.4, 50, 3).unwrap();
        assert!(report.random_min_ratio > 0.0);
        assert!(
            report.probed_min_sigma < 1e-6,
            "probed sigma_min = {}",
            report.probed_min_sigma
        );
        assert!(report.probed_min_ratio < 0.05 * report.random_min_ratio + 1e-12);
    }

    #[test]
    fn short_subsets_are_refused() {
        let a = crate::problem::generate_matrix(&model(MatrixKind::GaussianNormalized, 40, 30, 1))
            .unwrap();
        assert!(matches!(
            check_submatrix_conditioning(&a, 0.5, 10, 0),
            Err(Error::SubmatrixNotTall { subset: 20, cols: 30 })
        ));
    }

    #[test]
    fn subset_size_decimal_alpha_stays_exact() {
        assert_eq!(subset_size(0.4, 400), 160);
        assert_eq!(subset_size(0.5, 401), 201);
        assert_eq!(subset_size(1.0, 7), 7);
        assert_eq!(subset_size(0.001, 10), 1);
    }

    #[test]
    fn exceedance_count_and_normalized_quantile_range() {
        let a =
            crate::problem::generate_matrix(&model(MatrixKind::GaussianNormalized, 2000, 50, 11))
                .unwrap();
        let report = check_quantile_bounds(&a, 0.5, 0.25, 100, 11).unwrap();
        assert_eq!(report.exceedance_violations, 0);
        assert_eq!(report.skipped, 0);
        assert!(report.pass);
        assert!(
            report.min_normalized_quantile > 0.3 && report.max_normalized_quantile < 1.2,
            "normalized median range [{}, {}]",
            report.min_normalized_quantile,
            report.max_normalized_quantile
        );
    }

    #[test]
    fn exceedance_count_holds_across_matrix_kinds_and_alphas() {
        for kind in [
            MatrixKind::GaussianNormalized,
            MatrixKind::CoherentUniform,
            MatrixKind::BernoulliNormalized,
        ] {
            let a = crate::problem::generate_matrix(&model(kind, 300, 10, 5)).unwrap();
            for alpha in [0.05, 0.3, 1.0] {
                let report = check_quantile_bounds(&a, 0.9, alpha, 25, 5).unwrap();
                assert_eq!(report.exceedance_violations, 0, "{kind:?} alpha={alpha}");
            }
        }
    }

    #[test]
    fn eta_gap_is_exactly_zero_without_corruption() {
        let sys = build_system(
            &model(MatrixKind::GaussianNormalized, 200, 10, 13),
            &CorruptionModel::uniform(0.0, 1.0),
        )
        .unwrap();
        let report = check_eta_approximation(&sys, 20, 13).unwrap();
        assert_eq!(report.max_relative_gap, 0.0);
        assert!(report.pass);
    }

    #[test]
    fn eta_gap_is_small_under_light_corruption_and_grows_with_beta() {
        let mut medians = Vec::new();
        for beta in [0.05, 0.1, 0.2] {
            let sys = build_system(
                &model(MatrixKind::GaussianNormalized, 2000, 50, 17),
                &CorruptionModel::uniform(beta, 5.0),
            )
            .unwrap();
            let report = check_eta_approximation(&sys, 100, 17).unwrap();
            if beta == 0.05 {
                assert!(
                    report.max_relative_gap < 0.5,
                    "max gap {} at beta 0.05",
                    report.max_relative_gap
                );
                assert!(report.pass);
            }
            medians.push(report.median_relative_gap);
        }
        assert!(
            medians[0] < medians[1] && medians[1] < medians[2],
            "medians not increasing: {medians:?}"
        );
    }

    #[test]
    fn sandwich_holds_exactly() {
        for beta in [0.0, 0.1, 0.25] {
            let sys = build_system(
                &model(MatrixKind::GaussianNormalized, 120, 8, 19),
                &CorruptionModel::uniform(beta, 10.0),
            )
            .unwrap();
            let report = check_quantile_sandwich(&sys, 50, 19).unwrap();
            assert_eq!(report.violations, 0, "beta = {beta}");
            assert!(report.pass);
        }
    }
}
