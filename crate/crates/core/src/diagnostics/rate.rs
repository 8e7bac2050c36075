use serde::Serialize;

use crate::error::{Error, Result};
use crate::solvers::IterationTrace;

/// Least-squares estimate of the per-iteration error contraction: fit a line
/// to (k, ln error_k) and exponentiate the slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub rho_hat: f64,
    pub r_squared: f64,
    pub window_start: usize,
    pub window_end: usize,
}

/// Points required after burn-in for the fit to mean anything.
pub const MIN_FIT_POINTS: usize = 50;

/// Fits the contraction rate over the trace's relative errors, skipping the
/// first `burn_in` iterations. The window is truncated at the first
/// nonpositive error (log-space ends there); a perfectly flat window reports
/// rho_hat = 1 with a perfect fit.
pub fn fit_rate(trace: &IterationTrace, burn_in: usize) -> Result<RateFit> {
    let errors = trace.relative_errors();
    if errors.len() != trace.len() {
        return Err(Error::InvalidConfig {
            reason: "rate fitting needs relative errors on every iteration (x_star known)".into(),
        });
    }
    let mut end = errors.len();
    for (k, &e) in errors.iter().enumerate().skip(burn_in) {
        if e <= 0.0 {
            end = k;
            break;
        }
    }
    let needed = burn_in + MIN_FIT_POINTS;
    if end < needed {
        return Err(Error::TraceTooShort {
            needed,
            got: end,
        });
    }

    let window = &errors[burn_in..end];
    let n = window.len() as f64;
    let mean_k = burn_in as f64 + (window.len() - 1) as f64 / 2.0;
    let logs: Vec<f64> = window.iter().map(|e| e.ln()).collect();
    let mean_log = logs.iter().sum::<f64>() / n;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (off, &y) in logs.iter().enumerate() {
        let dx = (burn_in + off) as f64 - mean_k;
        let dy = y - mean_log;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // A flat window never sums to exactly zero in floating point (the mean
    // of identical logs picks up rounding), so compare against the rounding
    // scale of the accumulation instead.
    if syy <= 1e-24 * n * (1.0 + mean_log * mean_log) {
        return Ok(RateFit {
            rho_hat: 1.0,
            r_squared: 1.0,
            window_start: burn_in,
            window_end: end,
        });
    }
    let slope = sxy / sxx;
    let ss_res = syy - slope * sxy;
    let r_squared = (1.0 - ss_res / syy).clamp(0.0, 1.0);
    Ok(RateFit {
        rho_hat: slope.exp(),
        r_squared,
        window_start: burn_in,
        window_end: end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{generate_matrix, make_consistent_rhs, MatrixKind, MatrixModel};
    use crate::solvers::{solve, SolverConfig, TraceRow};

    fn trace_from(errors: &[f64]) -> IterationTrace {
        IterationTrace {
            rows: errors
                .iter()
                .enumerate()
                .map(|(k, &e)| TraceRow {
                    iteration: k,
                    relative_error: Some(e),
                    step_size: 0.0,
                    accepted: None,
                    threshold: None,
                })
                .collect(),
        }
    }

    #[test]
    fn recovers_a_noiseless_geometric_ratio() {
        let errors: Vec<f64> = (0..200).map(|k| 0.99f64.powi(k)).collect();
        let fit = fit_rate(&trace_from(&errors), 10).unwrap();
        assert!((fit.rho_hat - 0.99).abs() < 1e-6, "rho_hat = {}", fit.rho_hat);
        assert!(fit.r_squared > 0.999999);
        assert_eq!((fit.window_start, fit.window_end), (10, 200));
    }

    #[test]
    fn constant_trace_reports_unit_rate() {
        let errors = vec![0.5; 120];
        let fit = fit_rate(&trace_from(&errors), 0).unwrap();
        assert_eq!(fit.rho_hat, 1.0);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn window_truncates_at_the_first_zero_error() {
        let mut errors: Vec<f64> = (0..100).map(|k| 0.95f64.powi(k)).collect();
        errors.extend([0.0; 40]);
        let fit = fit_rate(&trace_from(&errors), 5).unwrap();
        assert_eq!(fit.window_end, 100);
        assert!((fit.rho_hat - 0.95).abs() < 1e-6);
    }

    #[test]
    fn too_short_windows_are_refused() {
        let errors = vec![1.0; 30];
        assert!(matches!(
            fit_rate(&trace_from(&errors), 0),
            Err(Error::TraceTooShort { .. })
        ));
        // Long enough overall, but the burn-in eats it.
        let errors = vec![1.0; 120];
        assert!(matches!(
            fit_rate(&trace_from(&errors), 100),
            Err(Error::TraceTooShort { .. })
        ));
    }

    #[test]
    fn plain_kaczmarz_contracts_on_a_consistent_system() {
        let a = generate_matrix(&MatrixModel {
            kind: MatrixKind::GaussianNormalized,
            rows: 500,
            cols: 20,
            seed: 3,
        })
        .unwrap();
        let (x_star, b) = make_consistent_rhs(&a, 3);
        // 800 iterations keeps the whole window inside the contraction
        // regime; much longer and the error parks at the floating-point
        // floor, flattening the tail of the log plot.
        let cfg = SolverConfig::rk(800, 3);
        let (_, trace) = solve(&a, &b, &cfg, Some(&x_star)).unwrap();
        let fit = fit_rate(&trace, 100).unwrap();
        assert!(fit.rho_hat < 1.0, "rho_hat = {}", fit.rho_hat);
        assert!(fit.r_squared > 0.95, "r_squared = {}", fit.r_squared);
    }
}
