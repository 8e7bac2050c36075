use std::fs;
use std::path::PathBuf;

use qrk_core::problem::{
    build_system_for_trial, corrupt, load_system, read_vector, CorruptionKind, CorruptionModel,
    MatrixKind, MatrixModel, SupportSize,
};
use qrk_core::rng::trial_seed;
use qrk_core::solvers::{
    solve, SolverConfig, ThresholdRule, DEFAULT_Q_RK, DEFAULT_Q_SGD, DEFAULT_SAMPLE_SIZE,
};
use qrk_core::{CorruptedSystem, Method};
use rayon::prelude::*;
use serde::Deserialize;

use crate::args::{CorruptionFlag, ExperimentArgs, ModelFlag, DEFAULT_SEED};
use crate::solve::threshold_from_flags;
use crate::{CmdError, CmdResult, EXIT_OK};

pub const SWEEP_NAMES: [&str; 5] = [
    "quantile-sweep",
    "convergence",
    "aspect-ratio",
    "corruption-size",
    "real-data",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Final error after a fixed budget over a beta x q grid (both quantile
    /// methods).
    QuantileSweep,
    /// Error versus iteration for all methods at fixed beta.
    Convergence,
    /// Final error versus the aspect ratio m/n.
    AspectRatio,
    /// Final error versus the corruption magnitude 10^x.
    CorruptionSize,
    /// Error versus iteration on an ingested system with count-based
    /// corruption.
    RealData,
}

impl Sweep {
    pub fn from_name(name: &str) -> CmdResult<Self> {
        match name {
            "quantile-sweep" => Ok(Sweep::QuantileSweep),
            "convergence" => Ok(Sweep::Convergence),
            "aspect-ratio" => Ok(Sweep::AspectRatio),
            "corruption-size" => Ok(Sweep::CorruptionSize),
            "real-data" => Ok(Sweep::RealData),
            other => Err(CmdError::usage(format!(
                "unknown sweep '{other}'; available sweeps: {}",
                SWEEP_NAMES.join(", ")
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sweep::QuantileSweep => "quantile-sweep",
            Sweep::Convergence => "convergence",
            Sweep::AspectRatio => "aspect-ratio",
            Sweep::CorruptionSize => "corruption-size",
            Sweep::RealData => "real-data",
        }
    }
}

/// Flat key-value parameter file; command-line flags override any field.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub model: Option<String>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub beta: Option<f64>,
    pub betas: Option<Vec<f64>>,
    pub qs: Option<Vec<f64>>,
    pub corruption: Option<String>,
    pub iterations: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub sample_size: Option<usize>,
    pub window: Option<usize>,
    pub refresh: Option<usize>,
    pub quantile_rk: Option<f64>,
    pub quantile_sgd: Option<f64>,
    pub ratios: Option<Vec<f64>>,
    pub exponents: Option<Vec<f64>>,
    pub matrix: Option<String>,
    pub rhs: Option<String>,
    pub x_star: Option<String>,
    pub corrupt_count: Option<usize>,
}

impl ExperimentSpec {
    pub fn from_path(path: &std::path::Path) -> CmdResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CmdError::failure(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CmdError::usage(format!("invalid spec file {}: {e}", path.display())))
    }
}

/// Fully resolved sweep parameters: per-sweep defaults overlaid with the spec
/// file and then the command line.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub kind: MatrixKind,
    pub rows: usize,
    pub cols: usize,
    pub beta: f64,
    pub corruption: CorruptionKind,
    pub iterations: usize,
    pub trials: usize,
    pub seed: u64,
    pub threshold: ThresholdRule,
    pub q_rk: f64,
    pub q_sgd: f64,
    pub betas: Vec<f64>,
    pub qs: Vec<f64>,
    pub ratios: Vec<f64>,
    pub exponents: Vec<f64>,
    pub matrix: Option<PathBuf>,
    pub rhs: Option<PathBuf>,
    pub x_star: Option<PathBuf>,
    pub corrupt_count: usize,
}

/// The default q grid: 0.05, 0.10, ..., 0.95.
pub fn default_q_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 20.0).collect()
}

impl SweepPlan {
    /// Desk-scale defaults for each sweep.
    pub fn for_sweep(sweep: Sweep) -> Self {
        let mut plan = SweepPlan {
            kind: MatrixKind::GaussianNormalized,
            rows: 2000,
            cols: 100,
            beta: 0.2,
            corruption: CorruptionKind::UniformAdditive { half_width: 5.0 },
            iterations: 2000,
            trials: 10,
            seed: DEFAULT_SEED,
            threshold: ThresholdRule::FreshSample {
                t: DEFAULT_SAMPLE_SIZE,
            },
            q_rk: DEFAULT_Q_RK,
            q_sgd: DEFAULT_Q_SGD,
            betas: vec![0.1, 0.2, 0.3],
            qs: default_q_grid(),
            ratios: vec![2.0, 4.0, 6.0, 8.0, 12.0, 16.0, 20.0],
            exponents: vec![0.0, 1.0, 2.0, 3.0],
            matrix: None,
            rhs: None,
            x_star: None,
            corrupt_count: 100,
        };
        match sweep {
            Sweep::QuantileSweep | Sweep::Convergence | Sweep::CorruptionSize => {}
            Sweep::AspectRatio => plan.iterations = 1000,
            // Ingested systems are smaller; a cheaper threshold sample
            // suffices and matters at their scale.
            Sweep::RealData => {
                plan.threshold = ThresholdRule::FreshSample { t: 100 };
            }
        }
        plan
    }

    fn config_for(&self, method: Method, trial: u64) -> SolverConfig {
        let seed = trial_seed(self.seed, trial);
        match method {
            Method::Rk => SolverConfig::rk(self.iterations, seed),
            Method::QuantileRk => SolverConfig::quantile_rk(self.q_rk, self.iterations, seed),
            Method::QuantileSgd => SolverConfig::quantile_sgd(self.q_sgd, self.iterations, seed),
            Method::OptSgd => SolverConfig::opt_sgd(self.iterations, seed),
        }
        .with_threshold(self.threshold)
    }
}

pub fn resolve(sweep: Sweep, args: &ExperimentArgs) -> CmdResult<SweepPlan> {
    let spec = match &args.spec {
        Some(path) => ExperimentSpec::from_path(path)?,
        None => ExperimentSpec::default(),
    };
    let mut plan = SweepPlan::for_sweep(sweep);

    let model = match (&args.model, &spec.model) {
        (Some(flag), _) => Some(*flag),
        (None, Some(name)) => Some(name.parse::<ModelFlag>().map_err(CmdError::usage)?),
        (None, None) => None,
    };
    if let Some(model) = model {
        plan.kind = model.kind();
    }
    let corruption = match (&args.corruption, &spec.corruption) {
        (Some(flag), _) => Some(*flag),
        (None, Some(text)) => Some(text.parse::<CorruptionFlag>().map_err(CmdError::usage)?),
        (None, None) => None,
    };
    if let Some(corruption) = corruption {
        plan.corruption = corruption.0;
    }

    if let Some(v) = spec.rows.into_iter().chain(args.rows).last() {
        plan.rows = v;
    }
    if let Some(v) = spec.cols.into_iter().chain(args.cols).last() {
        plan.cols = v;
    }
    if let Some(v) = spec.beta.into_iter().chain(args.beta).last() {
        plan.beta = v;
    }
    if let Some(v) = spec.iterations.into_iter().chain(args.iterations).last() {
        plan.iterations = v;
    }
    if let Some(v) = spec.trials.into_iter().chain(args.trials).last() {
        plan.trials = v;
    }
    if let Some(v) = spec.seed.into_iter().chain(args.seed).last() {
        plan.seed = v;
    }
    if let Some(v) = spec.quantile_rk.into_iter().chain(args.quantile_rk).last() {
        plan.q_rk = v;
    }
    if let Some(v) = spec.quantile_sgd.into_iter().chain(args.quantile_sgd).last() {
        plan.q_sgd = v;
    }
    if let Some(v) = spec.betas {
        plan.betas = v;
    }
    if let Some(v) = spec.qs {
        plan.qs = v;
    }
    if let Some(v) = spec.ratios {
        plan.ratios = v;
    }
    if let Some(v) = spec.exponents {
        plan.exponents = v;
    }
    if let Some(v) = spec
        .corrupt_count
        .into_iter()
        .chain(args.corrupt_count)
        .last()
    {
        plan.corrupt_count = v;
    }

    let sample_size = args.sample_size.or(spec.sample_size);
    let window = args.window.or(spec.window);
    let refresh = args.refresh.or(spec.refresh);
    if sample_size.is_some() || window.is_some() {
        plan.threshold = threshold_from_flags(sample_size, window, refresh)?;
    }

    plan.matrix = args
        .matrix
        .clone()
        .or_else(|| spec.matrix.as_ref().map(PathBuf::from));
    plan.rhs = args
        .rhs
        .clone()
        .or_else(|| spec.rhs.as_ref().map(PathBuf::from));
    plan.x_star = args
        .x_star
        .clone()
        .or_else(|| spec.x_star.as_ref().map(PathBuf::from));

    if plan.trials == 0 {
        return Err(CmdError::usage("trials must be at least 1"));
    }
    if plan.qs.is_empty() || plan.betas.is_empty() || plan.ratios.is_empty() || plan.exponents.is_empty() {
        return Err(CmdError::usage("parameter grids must be non-empty"));
    }
    Ok(plan)
}

fn log10_floor(v: f64) -> f64 {
    v.max(1e-300).log10()
}

/// Median under total order; `values` must be non-empty.
pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn build_trial_system(plan: &SweepPlan, rows: usize, beta: f64, kind: CorruptionKind, trial: u64) -> CmdResult<CorruptedSystem> {
    let model = MatrixModel {
        kind: plan.kind,
        rows,
        cols: plan.cols,
        seed: plan.seed,
    };
    let corruption = CorruptionModel {
        kind,
        support: SupportSize::Fraction(beta),
    };
    Ok(build_system_for_trial(&model, &corruption, trial)?)
}

fn final_error(plan: &SweepPlan, system: &CorruptedSystem, method: Method, q: f64, trial: u64) -> CmdResult<f64> {
    let mut config = plan.config_for(method, trial);
    config.q = q;
    let (_, trace) = solve(&system.a, &system.b, &config, Some(&system.x_star))?;
    trace
        .final_relative_error()
        .ok_or_else(|| CmdError::failure("trace carries no relative error".to_string()))
}

fn error_series(plan: &SweepPlan, system: &CorruptedSystem, method: Method, trial: u64) -> CmdResult<Vec<f64>> {
    let config = plan.config_for(method, trial);
    let (_, trace) = solve(&system.a, &system.b, &config, Some(&system.x_star))?;
    Ok(trace.relative_errors())
}

/// One aggregated grid point of the quantile sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub method: Method,
    pub beta: f64,
    pub q: f64,
    pub median_rel_error: f64,
    pub median_log10_rel_error: f64,
}

/// Final-error grid over beta x q for both quantile-gated methods, medianized
/// across trials. Systems are shared across methods and quantiles within a
/// (beta, trial) cell so differences are purely algorithmic.
pub fn quantile_sweep(plan: &SweepPlan) -> CmdResult<Vec<SweepPoint>> {
    let methods = [Method::QuantileRk, Method::QuantileSgd];
    let mut systems = Vec::with_capacity(plan.betas.len() * plan.trials);
    for &beta in &plan.betas {
        for trial in 0..plan.trials {
            systems.push(build_trial_system(plan, plan.rows, beta, plan.corruption, trial as u64)?);
        }
    }

    let mut jobs = Vec::new();
    for (mi, _) in methods.iter().enumerate() {
        for bi in 0..plan.betas.len() {
            for qi in 0..plan.qs.len() {
                for trial in 0..plan.trials {
                    jobs.push((mi, bi, qi, trial));
                }
            }
        }
    }
    let finals: Vec<f64> = jobs
        .par_iter()
        .map(|&(mi, bi, qi, trial)| {
            let system = &systems[bi * plan.trials + trial];
            final_error(plan, system, methods[mi], plan.qs[qi], trial as u64)
        })
        .collect::<CmdResult<_>>()?;

    let mut points = Vec::new();
    for (cell, chunk) in finals.chunks(plan.trials).enumerate() {
        let (mi, rest) = (cell / (plan.betas.len() * plan.qs.len()), cell % (plan.betas.len() * plan.qs.len()));
        let (bi, qi) = (rest / plan.qs.len(), rest % plan.qs.len());
        let mut errs: Vec<f64> = chunk.to_vec();
        let mut logs: Vec<f64> = chunk.iter().map(|&e| log10_floor(e)).collect();
        points.push(SweepPoint {
            method: methods[mi],
            beta: plan.betas[bi],
            q: plan.qs[qi],
            median_rel_error: median(&mut errs),
            median_log10_rel_error: median(&mut logs),
        });
    }
    Ok(points)
}

pub fn quantile_sweep_csv(plan: &SweepPlan, points: &[SweepPoint]) -> String {
    let mut out = String::from("method,beta,q,trials,iterations,median_rel_error,median_log10_rel_error\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.method, p.beta, p.q, plan.trials, plan.iterations, p.median_rel_error, p.median_log10_rel_error
        ));
    }
    out
}

/// One aggregated trace point of an error-versus-iteration sweep.
#[derive(Debug, Clone)]
pub struct ConvergencePoint {
    pub method: Method,
    pub iteration: usize,
    pub median_rel_error: f64,
    pub median_log10_rel_error: f64,
}

fn median_series(methods: &[Method], traces: &[Vec<f64>], trials: usize) -> Vec<ConvergencePoint> {
    let mut points = Vec::new();
    for (mi, &method) in methods.iter().enumerate() {
        let group = &traces[mi * trials..(mi + 1) * trials];
        let len = group.iter().map(|t| t.len()).min().unwrap_or(0);
        for it in 0..len {
            let mut errs: Vec<f64> = group.iter().map(|t| t[it]).collect();
            let mut logs: Vec<f64> = errs.iter().map(|&e| log10_floor(e)).collect();
            points.push(ConvergencePoint {
                method,
                iteration: it,
                median_rel_error: median(&mut errs),
                median_log10_rel_error: median(&mut logs),
            });
        }
    }
    points
}

/// Error versus iteration for every method on one synthetic configuration.
/// The exact-step method needs the planted solution and its analysis covers
/// the rotation-invariant ensemble, so it is included only for the Gaussian
/// model.
pub fn convergence(plan: &SweepPlan) -> CmdResult<Vec<ConvergencePoint>> {
    let mut methods = vec![Method::Rk, Method::QuantileRk, Method::QuantileSgd];
    if plan.kind == MatrixKind::GaussianNormalized {
        methods.push(Method::OptSgd);
    }
    let mut systems = Vec::with_capacity(plan.trials);
    for trial in 0..plan.trials {
        systems.push(build_trial_system(plan, plan.rows, plan.beta, plan.corruption, trial as u64)?);
    }
    let mut jobs = Vec::new();
    for mi in 0..methods.len() {
        for trial in 0..plan.trials {
            jobs.push((mi, trial));
        }
    }
    let traces: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(mi, trial)| error_series(plan, &systems[trial], methods[mi], trial as u64))
        .collect::<CmdResult<_>>()?;
    Ok(median_series(&methods, &traces, plan.trials))
}

pub fn convergence_csv(plan: &SweepPlan, points: &[ConvergencePoint]) -> String {
    let mut out = String::from("method,iteration,trials,median_rel_error,median_log10_rel_error\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.method, p.iteration, plan.trials, p.median_rel_error, p.median_log10_rel_error
        ));
    }
    out
}

/// One aggregated point of the aspect-ratio sweep.
#[derive(Debug, Clone)]
pub struct AspectRatioPoint {
    pub method: Method,
    pub rows: usize,
    pub ratio: f64,
    pub median_rel_error: f64,
    pub median_log10_rel_error: f64,
}

pub fn aspect_ratio(plan: &SweepPlan) -> CmdResult<Vec<AspectRatioPoint>> {
    let methods = [Method::QuantileRk, Method::QuantileSgd];
    for &r in &plan.ratios {
        if !(r >= 1.0) {
            return Err(CmdError::usage(format!("aspect ratio {r} must be >= 1")));
        }
    }
    let row_counts: Vec<usize> = plan
        .ratios
        .iter()
        .map(|&r| ((r * plan.cols as f64).round() as usize).max(plan.cols))
        .collect();
    let mut systems = Vec::with_capacity(plan.ratios.len() * plan.trials);
    for &rows in &row_counts {
        for trial in 0..plan.trials {
            systems.push(build_trial_system(plan, rows, plan.beta, plan.corruption, trial as u64)?);
        }
    }
    let mut jobs = Vec::new();
    for (mi, _) in methods.iter().enumerate() {
        for ri in 0..plan.ratios.len() {
            for trial in 0..plan.trials {
                jobs.push((mi, ri, trial));
            }
        }
    }
    let finals: Vec<f64> = jobs
        .par_iter()
        .map(|&(mi, ri, trial)| {
            let system = &systems[ri * plan.trials + trial];
            let q = match methods[mi] {
                Method::QuantileSgd => plan.q_sgd,
                _ => plan.q_rk,
            };
            final_error(plan, system, methods[mi], q, trial as u64)
        })
        .collect::<CmdResult<_>>()?;

    let mut points = Vec::new();
    for (cell, chunk) in finals.chunks(plan.trials).enumerate() {
        let (mi, ri) = (cell / plan.ratios.len(), cell % plan.ratios.len());
        let mut errs: Vec<f64> = chunk.to_vec();
        let mut logs: Vec<f64> = chunk.iter().map(|&e| log10_floor(e)).collect();
        points.push(AspectRatioPoint {
            method: methods[mi],
            rows: row_counts[ri],
            ratio: plan.ratios[ri],
            median_rel_error: median(&mut errs),
            median_log10_rel_error: median(&mut logs),
        });
    }
    Ok(points)
}

pub fn aspect_ratio_csv(plan: &SweepPlan, points: &[AspectRatioPoint]) -> String {
    let mut out =
        String::from("method,rows,cols,ratio,trials,iterations,median_rel_error,median_log10_rel_error\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.method, p.rows, plan.cols, p.ratio, plan.trials, plan.iterations, p.median_rel_error, p.median_log10_rel_error
        ));
    }
    out
}

/// One aggregated point of the corruption-size sweep.
#[derive(Debug, Clone)]
pub struct CorruptionSizePoint {
    pub method: Method,
    pub exponent: f64,
    pub median_rel_error: f64,
    pub median_log10_rel_error: f64,
}

/// Final error versus corruption magnitude 10^x at fixed beta; the corruption
/// kind is forced to uniform with half-width 10^x.
pub fn corruption_size(plan: &SweepPlan) -> CmdResult<Vec<CorruptionSizePoint>> {
    let methods = [Method::QuantileRk, Method::QuantileSgd];
    let mut systems = Vec::with_capacity(plan.exponents.len() * plan.trials);
    for &x in &plan.exponents {
        let kind = CorruptionKind::MagnitudeScaled { exponent: x };
        for trial in 0..plan.trials {
            systems.push(build_trial_system(plan, plan.rows, plan.beta, kind, trial as u64)?);
        }
    }
    let mut jobs = Vec::new();
    for (mi, _) in methods.iter().enumerate() {
        for xi in 0..plan.exponents.len() {
            for trial in 0..plan.trials {
                jobs.push((mi, xi, trial));
            }
        }
    }
    let finals: Vec<f64> = jobs
        .par_iter()
        .map(|&(mi, xi, trial)| {
            let system = &systems[xi * plan.trials + trial];
            let q = match methods[mi] {
                Method::QuantileSgd => plan.q_sgd,
                _ => plan.q_rk,
            };
            final_error(plan, system, methods[mi], q, trial as u64)
        })
        .collect::<CmdResult<_>>()?;

    let mut points = Vec::new();
    for (cell, chunk) in finals.chunks(plan.trials).enumerate() {
        let (mi, xi) = (cell / plan.exponents.len(), cell % plan.exponents.len());
        let mut errs: Vec<f64> = chunk.to_vec();
        let mut logs: Vec<f64> = chunk.iter().map(|&e| log10_floor(e)).collect();
        points.push(CorruptionSizePoint {
            method: methods[mi],
            exponent: plan.exponents[xi],
            median_rel_error: median(&mut errs),
            median_log10_rel_error: median(&mut logs),
        });
    }
    Ok(points)
}

pub fn corruption_size_csv(plan: &SweepPlan, points: &[CorruptionSizePoint]) -> String {
    let mut out = String::from(
        "method,exponent,half_width,beta,trials,iterations,median_rel_error,median_log10_rel_error\n",
    );
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.method,
            p.exponent,
            10f64.powf(p.exponent),
            plan.beta,
            plan.trials,
            plan.iterations,
            p.median_rel_error,
            p.median_log10_rel_error
        ));
    }
    out
}

/// Error versus iteration on an ingested system. The loaded rows are
/// normalized, the reference solution must reproduce the loaded right-hand
/// side, and each trial re-corrupts a fresh count-sized subset of rows.
pub fn real_data(plan: &SweepPlan) -> CmdResult<Vec<ConvergencePoint>> {
    let matrix = plan
        .matrix
        .as_ref()
        .ok_or_else(|| CmdError::usage("real-data needs --matrix"))?;
    let rhs = plan
        .rhs
        .as_ref()
        .ok_or_else(|| CmdError::usage("real-data needs --rhs"))?;
    let x_star_path = plan
        .x_star
        .as_ref()
        .ok_or_else(|| CmdError::usage("real-data needs --x-star"))?;

    let loaded = load_system(matrix, rhs, true)?;
    let x_star = read_vector(x_star_path)?;
    if x_star.len() != loaded.a.ncols() {
        return Err(CmdError::failure(format!(
            "--x-star has {} entries but the matrix has {} columns",
            x_star.len(),
            loaded.a.ncols()
        )));
    }
    let mut worst = 0.0f64;
    for i in 0..loaded.a.nrows() {
        let r = (qrk_core::linalg::dot(loaded.a.row(i)?, &x_star)? - loaded.b[i]).abs();
        worst = worst.max(r);
    }
    let scale = 1.0 + loaded.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if worst > 1e-6 * scale {
        return Err(CmdError::failure(format!(
            "rhs is not consistent with --x-star (worst residual {worst:.3e}); \
             corruption is injected locally, so the ingested system must be clean"
        )));
    }

    let corruption = CorruptionModel {
        kind: plan.corruption,
        support: SupportSize::Count(plan.corrupt_count),
    };
    corruption.validate()?;
    let methods = [Method::Rk, Method::QuantileRk, Method::QuantileSgd];
    let mut systems = Vec::with_capacity(plan.trials);
    for trial in 0..plan.trials {
        systems.push(corrupt(
            &loaded.a,
            &x_star,
            &corruption,
            trial_seed(plan.seed, trial as u64),
        )?);
    }
    let mut jobs = Vec::new();
    for mi in 0..methods.len() {
        for trial in 0..plan.trials {
            jobs.push((mi, trial));
        }
    }
    let traces: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(mi, trial)| error_series(plan, &systems[trial], methods[mi], trial as u64))
        .collect::<CmdResult<_>>()?;
    Ok(median_series(&methods, &traces, plan.trials))
}

pub fn real_data_csv(plan: &SweepPlan, points: &[ConvergencePoint]) -> String {
    let mut out =
        String::from("method,iteration,trials,corrupt_count,median_rel_error,median_log10_rel_error\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.method, p.iteration, plan.trials, plan.corrupt_count, p.median_rel_error, p.median_log10_rel_error
        ));
    }
    out
}

pub fn run(args: &ExperimentArgs) -> CmdResult<i32> {
    let sweep = Sweep::from_name(&args.sweep)?;
    let plan = resolve(sweep, args)?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", sweep.name())));

    let (csv, rows) = match sweep {
        Sweep::QuantileSweep => {
            let points = quantile_sweep(&plan)?;
            (quantile_sweep_csv(&plan, &points), points.len())
        }
        Sweep::Convergence => {
            let points = convergence(&plan)?;
            (convergence_csv(&plan, &points), points.len())
        }
        Sweep::AspectRatio => {
            let points = aspect_ratio(&plan)?;
            (aspect_ratio_csv(&plan, &points), points.len())
        }
        Sweep::CorruptionSize => {
            let points = corruption_size(&plan)?;
            (corruption_size_csv(&plan, &points), points.len())
        }
        Sweep::RealData => {
            let points = real_data(&plan)?;
            (real_data_csv(&plan, &points), points.len())
        }
    };
    fs::write(&out, csv)
        .map_err(|e| CmdError::failure(format!("cannot write {}: {e}", out.display())))?;
    println!("{}: {} rows -> {}", sweep.name(), rows, out.display());
    Ok(EXIT_OK)
}
