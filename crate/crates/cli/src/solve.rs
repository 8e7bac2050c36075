use std::fs;
use std::time::Instant;

use qrk_core::problem::{load_system, read_vector, write_csv_column};
use qrk_core::solvers::{
    solve, SolverConfig, ThresholdRule, DEFAULT_Q_RK, DEFAULT_Q_SGD, DEFAULT_SAMPLE_SIZE,
};
use qrk_core::Method;

use crate::args::SolveArgs;
use crate::{CmdError, CmdResult, EXIT_OK};

/// Builds the threshold rule from the `--sample-size`/`--window`/`--refresh`
/// flag triple. `--sample-size 0` selects the exact rule that scans every
/// residual.
pub fn threshold_from_flags(
    sample_size: Option<usize>,
    window: Option<usize>,
    refresh: Option<usize>,
) -> CmdResult<ThresholdRule> {
    match (sample_size, window) {
        (Some(_), Some(_)) => Err(CmdError::usage(
            "--sample-size and --window are mutually exclusive",
        )),
        (Some(0), None) => Ok(ThresholdRule::FullResidual),
        (Some(t), None) => Ok(ThresholdRule::FreshSample { t }),
        (None, Some(w)) => Ok(ThresholdRule::SlidingWindow {
            window: w,
            refresh: refresh.unwrap_or(1),
        }),
        (None, None) => Ok(ThresholdRule::FreshSample {
            t: DEFAULT_SAMPLE_SIZE,
        }),
    }
}

pub fn run(args: &SolveArgs) -> CmdResult<i32> {
    let rule = threshold_from_flags(args.sample_size, args.window, Some(args.refresh))?;
    let q = args.quantile.unwrap_or(match args.method {
        Method::QuantileSgd => DEFAULT_Q_SGD,
        _ => DEFAULT_Q_RK,
    });

    let loaded = load_system(&args.matrix, &args.rhs, args.normalize)?;
    if !loaded.dropped_rows.is_empty() {
        eprintln!(
            "note: dropped {} zero row(s) during normalization",
            loaded.dropped_rows.len()
        );
    }
    let x_star = args
        .x_star
        .as_ref()
        .map(|p| read_vector(p))
        .transpose()?;
    if args.method == Method::OptSgd && x_star.is_none() {
        return Err(CmdError::usage("opt-sgd requires --x-star"));
    }
    if let Some(xs) = &x_star {
        if xs.len() != loaded.a.ncols() {
            return Err(CmdError::failure(format!(
                "--x-star has {} entries but the matrix has {} columns",
                xs.len(),
                loaded.a.ncols()
            )));
        }
    }

    let mut config = match args.method {
        Method::Rk => SolverConfig::rk(args.iterations, args.seed),
        Method::QuantileRk => SolverConfig::quantile_rk(q, args.iterations, args.seed),
        Method::QuantileSgd => SolverConfig::quantile_sgd(q, args.iterations, args.seed),
        Method::OptSgd => SolverConfig::opt_sgd(args.iterations, args.seed),
    }
    .with_threshold(rule);
    config.target_rel_error = args.target_rel_error;

    let start = Instant::now();
    let (x, trace) = solve(&loaded.a, &loaded.b, &config, x_star.as_deref())?;
    let wall = start.elapsed();

    fs::write(&args.out, trace.to_csv())
        .map_err(|e| CmdError::failure(format!("cannot write {}: {e}", args.out.display())))?;
    if let Some(path) = &args.solution {
        write_csv_column(path, &x)?;
    }

    let ran = trace.len().saturating_sub(1);
    match trace.final_relative_error() {
        Some(err) => println!(
            "{}: {} iterations in {:.1} ms, final relative error {err:.6e}, trace -> {}",
            args.method,
            ran,
            wall.as_secs_f64() * 1e3,
            args.out.display()
        ),
        None => println!(
            "{}: {} iterations in {:.1} ms, trace -> {}",
            args.method,
            ran,
            wall.as_secs_f64() * 1e3,
            args.out.display()
        ),
    }
    Ok(EXIT_OK)
}
