use std::fs;

use qrk_core::diagnostics::{
    check_eta_approximation, check_quantile_bounds, check_quantile_sandwich,
    check_submatrix_conditioning, SubmatrixReport,
};
use qrk_core::problem::{build_system, generate_matrix, CorruptionModel, MatrixKind, MatrixModel};
use qrk_core::rng::trial_seed;
use qrk_core::streaming::{half_normal_quantile, streaming_feasible, STREAMING_RATE_CONSTANT};
use serde_json::{json, Value};

use crate::args::CheckArgs;
use crate::{CmdError, CmdResult, EXIT_FAILURE, EXIT_OK};

pub const CHECK_NAMES: [&str; 5] = [
    "quantile-sandwich",
    "quantile-bounds",
    "submatrix",
    "eta-approx",
    "streaming-feasible",
];

/// System shapes for the ensemble checks, derived from the seed so the
/// ensemble is randomized but reruns are identical.
fn ensemble_params(seed: u64, index: u64) -> (MatrixKind, usize, usize, f64) {
    let h = trial_seed(seed, index);
    let kind = match h % 3 {
        0 => MatrixKind::GaussianNormalized,
        1 => MatrixKind::CoherentUniform,
        _ => MatrixKind::BernoulliNormalized,
    };
    let rows = 40 + ((h >> 2) % 140) as usize;
    let cols = 2 + ((h >> 10) % 8) as usize;
    let beta = ((h >> 18) % 7) as f64 * 0.05;
    (kind, rows, cols, beta)
}

#[derive(Debug, Clone, Copy)]
pub struct EnsembleOutcome {
    pub systems: usize,
    pub violations: usize,
    pub pass: bool,
}

/// Exact order-statistic sandwich on randomized corrupted systems.
pub fn sandwich_ensemble(systems: usize, trials: usize, seed: u64) -> CmdResult<EnsembleOutcome> {
    let mut violations = 0;
    for s in 0..systems {
        let (kind, rows, cols, beta) = ensemble_params(seed, s as u64);
        let model = MatrixModel {
            kind,
            rows,
            cols,
            seed: trial_seed(seed, s as u64),
        };
        let system = build_system(&model, &CorruptionModel::uniform(beta, 5.0))?;
        let report = check_quantile_sandwich(&system, trials, trial_seed(seed, s as u64))?;
        violations += report.violations;
    }
    Ok(EnsembleOutcome {
        systems,
        violations,
        pass: violations == 0,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct CountBoundOutcome {
    pub systems: usize,
    pub violations: usize,
    pub min_normalized_quantile: f64,
    pub max_normalized_quantile: f64,
    pub pass: bool,
}

/// Markov-style exceedance count and normalized-quantile positivity on
/// randomized matrices.
pub fn count_bound_ensemble(
    systems: usize,
    q: f64,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> CmdResult<CountBoundOutcome> {
    let mut violations = 0;
    let mut min_nq = f64::INFINITY;
    let mut max_nq = f64::NEG_INFINITY;
    let mut pass = true;
    for s in 0..systems {
        let (kind, rows, cols, _) = ensemble_params(seed, s as u64);
        let a = generate_matrix(&MatrixModel {
            kind,
            rows,
            cols,
            seed: trial_seed(seed, s as u64),
        })?;
        let report = check_quantile_bounds(&a, q, alpha, trials, trial_seed(seed, s as u64))?;
        violations += report.exceedance_violations;
        min_nq = min_nq.min(report.min_normalized_quantile);
        max_nq = max_nq.max(report.max_normalized_quantile);
        pass &= report.pass;
    }
    Ok(CountBoundOutcome {
        systems,
        violations,
        min_normalized_quantile: min_nq,
        max_normalized_quantile: max_nq,
        pass: pass && violations == 0,
    })
}

/// Submatrix conditioning report plus a warning flag for ensembles where the
/// adversarial probe found a much worse-conditioned row subset than random
/// sampling did (coherent or +-1 designs at small n).
pub fn submatrix_with_warning(
    kind: MatrixKind,
    rows: usize,
    cols: usize,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> CmdResult<(SubmatrixReport, bool)> {
    let a = generate_matrix(&MatrixModel {
        kind,
        rows,
        cols,
        seed,
    })?;
    let report = check_submatrix_conditioning(&a, alpha, trials, seed)?;
    let warning =
        report.probed_min_sigma < 1e-6 || report.probed_min_ratio < 0.05 * report.random_min_ratio;
    Ok((report, warning))
}

fn run_one(name: &str, args: &CheckArgs) -> CmdResult<(Value, bool)> {
    match name {
        "quantile-sandwich" => {
            let systems = args.systems.unwrap_or(20);
            let trials = args.trials.unwrap_or(10);
            let outcome = sandwich_ensemble(systems, trials, args.seed)?;
            Ok((
                json!({
                    "check": name,
                    "params": {"systems": systems, "trials": trials, "seed": args.seed},
                    "stats": {"violations": outcome.violations},
                    "pass": outcome.pass,
                }),
                outcome.pass,
            ))
        }
        "quantile-bounds" => {
            let systems = args.systems.unwrap_or(20);
            let trials = args.trials.unwrap_or(20);
            let q = args.q.unwrap_or(0.5);
            let alpha = args.alpha.unwrap_or(0.25);
            let outcome = count_bound_ensemble(systems, q, alpha, trials, args.seed)?;
            Ok((
                json!({
                    "check": name,
                    "params": {"systems": systems, "trials": trials, "q": q, "alpha": alpha, "seed": args.seed},
                    "stats": {
                        "violations": outcome.violations,
                        "min_normalized_quantile": outcome.min_normalized_quantile,
                        "max_normalized_quantile": outcome.max_normalized_quantile,
                    },
                    "pass": outcome.pass,
                }),
                outcome.pass,
            ))
        }
        "submatrix" => {
            let kind = args.model.map(|m| m.kind()).unwrap_or(MatrixKind::GaussianNormalized);
            let rows = args.rows.unwrap_or(400);
            let cols = args.cols.unwrap_or(50);
            let alpha = args.alpha.unwrap_or(0.4);
            let trials = args.trials.unwrap_or(200);
            let (report, warning) = submatrix_with_warning(kind, rows, cols, alpha, trials, args.seed)?;
            let pass = report.pass;
            let mut stats = serde_json::to_value(&report)
                .map_err(|e| CmdError::failure(format!("report serialization failed: {e}")))?;
            stats["warning"] = Value::Bool(warning);
            if warning {
                eprintln!(
                    "warning: probed row subsets are far worse conditioned than random ones \
                     (probed min sigma {:.3e}); quantile thresholds may pass corrupted rows",
                    report.probed_min_sigma
                );
            }
            Ok((
                json!({
                    "check": name,
                    "params": {"rows": rows, "cols": cols, "alpha": alpha, "trials": trials, "seed": args.seed},
                    "stats": stats,
                    "pass": pass,
                }),
                pass,
            ))
        }
        "eta-approx" => {
            let rows = args.rows.unwrap_or(2000);
            let cols = args.cols.unwrap_or(100);
            let beta = args.beta.unwrap_or(0.1);
            let samples = args.samples.unwrap_or(100);
            let model = MatrixModel {
                kind: args.model.map(|m| m.kind()).unwrap_or(MatrixKind::GaussianNormalized),
                rows,
                cols,
                seed: args.seed,
            };
            let system = build_system(&model, &CorruptionModel::uniform(beta, 5.0))?;
            let report = check_eta_approximation(&system, samples, args.seed)?;
            let pass = report.pass;
            let stats = serde_json::to_value(&report)
                .map_err(|e| CmdError::failure(format!("report serialization failed: {e}")))?;
            Ok((
                json!({
                    "check": name,
                    "params": {"rows": rows, "cols": cols, "beta": beta, "samples": samples, "seed": args.seed},
                    "stats": stats,
                    "pass": pass,
                }),
                pass,
            ))
        }
        "streaming-feasible" => {
            let q = args.q.unwrap_or(0.5);
            let beta = args.beta.unwrap_or(0.18);
            let feasible =
                streaming_feasible(q, beta).map_err(|e| CmdError::usage(e.to_string()))?;
            let level = half_normal_quantile(q + beta)
                .map_err(|e| CmdError::usage(e.to_string()))?;
            let bound = STREAMING_RATE_CONSTANT
                * (1.0 - 2.0 * beta)
                * (2.0 / std::f64::consts::PI).sqrt();
            Ok((
                json!({
                    "check": name,
                    "params": {"q": q, "beta": beta},
                    "stats": {
                        "feasible": feasible,
                        "quantile_level": level,
                        "bound": bound,
                        "rate_constant": STREAMING_RATE_CONSTANT,
                    },
                    "pass": feasible,
                }),
                feasible,
            ))
        }
        other => Err(CmdError::usage(format!(
            "unknown check '{other}'; available checks: {}, all",
            CHECK_NAMES.join(", ")
        ))),
    }
}

pub fn run(args: &CheckArgs) -> CmdResult<i32> {
    let names: Vec<&str> = if args.check == "all" {
        CHECK_NAMES.to_vec()
    } else {
        vec![args.check.as_str()]
    };
    let mut checks = Vec::new();
    let mut all_pass = true;
    for name in names {
        let (value, pass) = run_one(name, args)?;
        all_pass &= pass;
        checks.push(value);
    }
    let report = json!({"checks": checks, "pass": all_pass});
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| CmdError::failure(format!("report serialization failed: {e}")))?;
    text.push('\n');
    print!("{text}");
    if let Some(path) = &args.out {
        fs::write(path, &text)
            .map_err(|e| CmdError::failure(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_FAILURE })
}
