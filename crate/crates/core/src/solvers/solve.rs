use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    dot_unchecked, project_row_mut, residual_sign, sign_step_mut, DenseMatrix, Vector,
};
use crate::rng::{role_rng, StreamRole};
use crate::solvers::{IterationTrace, Method, QuantileEstimator, SolverConfig, TraceRow};

/// Runs the configured method on (A, b) from x_0 (origin unless overridden).
///
/// `x_star` is evaluation-only for most methods (it feeds the relative-error
/// column and early stopping) but mandatory input for `opt-sgd`, whose step
/// size is defined through the true error. The run is strictly sequential and
/// deterministic for a fixed (system, config) pair.
pub fn solve(
    a: &DenseMatrix,
    b: &[f64],
    config: &SolverConfig,
    x_star: Option<&[f64]>,
) -> Result<(Vector, IterationTrace)> {
    let m = a.nrows();
    let n = a.ncols();
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: b.len(),
        });
    }
    if let Some(xs) = x_star {
        if xs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: xs.len(),
            });
        }
    }
    config.validate(m)?;
    if config.method == Method::OptSgd && x_star.is_none() {
        return Err(Error::MissingXStar {
            reason: "opt-sgd derives its step size from the true error",
        });
    }
    let deviation = a.max_row_norm_deviation();
    if deviation > 1e-9 {
        return Err(Error::InvalidConfig {
            reason: format!(
                "rows must be unit-norm (worst deviation {deviation:.3e}); normalize on ingestion"
            ),
        });
    }

    let mut x: Vec<f64> = match &config.x0 {
        Some(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
            v.as_slice().to_vec()
        }
        None => vec![0.0; n],
    };

    let mut rng = role_rng(config.seed, StreamRole::Solver);
    let mut estimator = QuantileEstimator::new(config.threshold);
    // Precomputed A x_star lets the opt-sgd step size run one dot per row.
    let ax_star = match (config.method, x_star) {
        (Method::OptSgd, Some(xs)) => Some(a.mul_vec(xs)?),
        _ => None,
    };

    let e0 = x_star.map(|xs| distance(&x, xs));
    let rel_err = |x: &[f64]| -> Option<f64> {
        x_star.map(|xs| {
            let d = distance(x, xs);
            match e0 {
                Some(denom) if denom > 0.0 => d / denom,
                // Degenerate start x_0 = x_star: report 0 while the iterate
                // stays put, infinity if corruption pushes it off.
                _ => {
                    if d == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                }
            }
        })
    };

    let mut trace = IterationTrace::default();
    trace.rows.push(TraceRow {
        iteration: 0,
        relative_error: rel_err(&x),
        step_size: 0.0,
        accepted: None,
        threshold: None,
    });

    for k in 1..=config.iterations {
        let row = match config.method {
            Method::Rk => {
                let idx = rng.random_range(0..m);
                let r = project_row_mut(&mut x, a.row_unchecked(idx), b[idx]);
                TraceRow {
                    iteration: k,
                    relative_error: None,
                    step_size: r.abs(),
                    accepted: None,
                    threshold: None,
                }
            }
            Method::QuantileRk => {
                let (accepted, threshold, step) =
                    quantile_rk_step(&mut x, a, b, config.q, &mut estimator, &mut rng);
                TraceRow {
                    iteration: k,
                    relative_error: None,
                    step_size: step,
                    accepted: Some(accepted),
                    threshold: Some(threshold),
                }
            }
            Method::QuantileSgd => {
                let gamma = quantile_sgd_step(&mut x, a, b, config.q, &mut estimator, &mut rng);
                TraceRow {
                    iteration: k,
                    relative_error: None,
                    step_size: gamma,
                    accepted: None,
                    threshold: Some(gamma),
                }
            }
            Method::OptSgd => {
                let eta = opt_step_with_ax_star(&x, a, b, ax_star.as_ref().expect("computed above"));
                let gamma = if config.clamp_step { eta.max(0.0) } else { eta };
                let idx = rng.random_range(0..m);
                sign_step_mut(&mut x, a.row_unchecked(idx), b[idx], gamma);
                TraceRow {
                    iteration: k,
                    relative_error: None,
                    step_size: gamma,
                    accepted: None,
                    threshold: None,
                }
            }
        };
        let rel = rel_err(&x);
        trace.rows.push(TraceRow {
            relative_error: rel,
            ..row
        });
        if let (Some(target), Some(r)) = (config.target_rel_error, rel) {
            if r <= target {
                break;
            }
        }
    }

    Ok((Vector::from_raw(x), trace))
}

fn distance(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for i in 0..x.len() {
        let d = x[i] - y[i];
        acc += d * d;
    }
    acc.sqrt()
}

/// Gated projection: threshold from the estimator, then an independent row
/// index; project only when that row's residual magnitude is within the
/// threshold (<=, so zero-residual rows always pass).
fn quantile_rk_step<R: Rng>(
    x: &mut [f64],
    a: &DenseMatrix,
    b: &[f64],
    q: f64,
    estimator: &mut QuantileEstimator,
    rng: &mut R,
) -> (bool, f64, f64) {
    let threshold = estimator.next_threshold(a, b, x, q, rng);
    let idx = rng.random_range(0..a.nrows());
    let row = a.row_unchecked(idx);
    let r = dot_unchecked(row, x) - b[idx];
    if r.abs() <= threshold {
        for i in 0..x.len() {
            x[i] -= r * row[i];
        }
        (true, threshold, r.abs())
    } else {
        (false, threshold, 0.0)
    }
}

/// Signed step of length = the estimated quantile.
fn quantile_sgd_step<R: Rng>(
    x: &mut [f64],
    a: &DenseMatrix,
    b: &[f64],
    q: f64,
    estimator: &mut QuantileEstimator,
    rng: &mut R,
) -> f64 {
    let gamma = estimator.next_threshold(a, b, x, q, rng);
    let idx = rng.random_range(0..a.nrows());
    sign_step_mut(x, a.row_unchecked(idx), b[idx], gamma);
    gamma
}

/// One public iteration of the gated projection method, for callers driving
/// the loop themselves. Returns (next iterate, accepted, threshold).
pub fn quantile_rk_iteration<R: Rng>(
    x: &[f64],
    a: &DenseMatrix,
    b: &[f64],
    q: f64,
    estimator: &mut QuantileEstimator,
    rng: &mut R,
) -> Result<(Vector, bool, f64)> {
    check_iteration_args(x, a, b, q)?;
    let mut next = x.to_vec();
    let (accepted, threshold, _) = quantile_rk_step(&mut next, a, b, q, estimator, rng);
    Ok((Vector::from_raw(next), accepted, threshold))
}

/// One public iteration of the quantile-step method. Returns (next iterate,
/// gamma).
pub fn quantile_sgd_iteration<R: Rng>(
    x: &[f64],
    a: &DenseMatrix,
    b: &[f64],
    q: f64,
    estimator: &mut QuantileEstimator,
    rng: &mut R,
) -> Result<(Vector, f64)> {
    check_iteration_args(x, a, b, q)?;
    let mut next = x.to_vec();
    let gamma = quantile_sgd_step(&mut next, a, b, q, estimator, rng);
    Ok((Vector::from_raw(next), gamma))
}

fn check_iteration_args(x: &[f64], a: &DenseMatrix, b: &[f64], q: f64) -> Result<()> {
    if x.len() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            got: x.len(),
        });
    }
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.len(),
        });
    }
    if !(q > 0.0 && q <= 1.0) || !q.is_finite() {
        return Err(Error::QuantileOutOfRange { q });
    }
    Ok(())
}

/// Oracle step size: the average of sign(<a_i,x> - b_i) * <x - x_star, a_i>
/// over all rows. On an uncorrupted system every term is |<x - x_star, a_i>|,
/// so this coincides with the mean absolute clean residual.
pub fn opt_sgd_step_size(
    x: &[f64],
    a: &DenseMatrix,
    b: &[f64],
    x_star: &[f64],
) -> Result<f64> {
    if x.len() != a.ncols() || x_star.len() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            got: if x.len() != a.ncols() { x.len() } else { x_star.len() },
        });
    }
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.len(),
        });
    }
    let ax_star = a.mul_vec(x_star)?;
    Ok(opt_step_with_ax_star(x, a, b, &ax_star))
}

fn opt_step_with_ax_star(x: &[f64], a: &DenseMatrix, b: &[f64], ax_star: &Vector) -> f64 {
    let m = a.nrows();
    let mut acc = 0.0;
    for i in 0..m {
        let ax = dot_unchecked(a.row_unchecked(i), x);
        let s = residual_sign(ax - b[i]);
        acc += s * (ax - ax_star[i]);
    }
    acc / m as f64
}

/// Shared driver for solving the same system with a caller-supplied RNG; used
/// by tests that need to replay iterations manually.
pub fn solver_rng(seed: u64) -> ChaCha8Rng {
    role_rng(seed, StreamRole::Solver)
}
