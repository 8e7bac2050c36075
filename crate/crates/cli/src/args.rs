use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrk_core::problem::{CorruptionKind, MatrixKind};
use qrk_core::Method;

/// Default seed used by every subcommand unless overridden.
pub const DEFAULT_SEED: u64 = 1729;

#[derive(Debug, Parser)]
#[command(
    name = "qrk",
    version,
    about = "Quantile-robust Kaczmarz/SGD solvers for corrupted linear systems"
)]
pub struct Cli {
    /// Worker threads for trial-parallel experiments (0 = rayon default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a corrupted benchmark system and write it to a directory.
    Generate(GenerateArgs),
    /// Run one solver on a system read from disk and write its trace.
    Solve(SolveArgs),
    /// Run a named parameter sweep and write one tidy CSV.
    Experiment(ExperimentArgs),
    /// Run diagnostic checks and emit a JSON report with pass flags.
    CheckTheory(CheckArgs),
}

/// Random matrix ensemble selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelFlag {
    /// Independent Gaussian entries, rows normalized (uniform on the sphere).
    Gaussian,
    /// Entries uniform on [0,1), rows normalized; highly coherent rows.
    Coherent,
    /// Symmetric +-1 entries scaled to unit rows.
    Bernoulli,
}

impl ModelFlag {
    pub fn kind(self) -> MatrixKind {
        match self {
            ModelFlag::Gaussian => MatrixKind::GaussianNormalized,
            ModelFlag::Coherent => MatrixKind::CoherentUniform,
            ModelFlag::Bernoulli => MatrixKind::BernoulliNormalized,
        }
    }
}

impl fmt::Display for ModelFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ModelFlag::Gaussian => "gaussian",
            ModelFlag::Coherent => "coherent",
            ModelFlag::Bernoulli => "bernoulli",
        };
        f.write_str(name)
    }
}

impl FromStr for ModelFlag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(ModelFlag::Gaussian),
            "coherent" => Ok(ModelFlag::Coherent),
            "bernoulli" => Ok(ModelFlag::Bernoulli),
            other => Err(format!(
                "unknown model '{other}' (expected gaussian, coherent, or bernoulli)"
            )),
        }
    }
}

/// Corruption selector in `kind:value` form: `uniform:C` adds a uniform value
/// from [-C, C], `mag:X` is shorthand for uniform with half-width 10^X, and
/// `adversarial:S` replaces entries with a consistent phantom solution offset
/// by S.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptionFlag(pub CorruptionKind);

impl FromStr for CorruptionFlag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| format!("corruption '{s}' must look like uniform:5, mag:2, or adversarial:1"))?;
        let value: f64 = value
            .parse()
            .map_err(|_| format!("corruption value '{value}' is not a number"))?;
        match kind {
            "uniform" => Ok(CorruptionFlag(CorruptionKind::UniformAdditive {
                half_width: value,
            })),
            "mag" => Ok(CorruptionFlag(CorruptionKind::MagnitudeScaled {
                exponent: value,
            })),
            "adversarial" => Ok(CorruptionFlag(CorruptionKind::AdversarialConsistent {
                offset_scale: value,
            })),
            other => Err(format!(
                "unknown corruption kind '{other}' (expected uniform, mag, or adversarial)"
            )),
        }
    }
}

impl fmt::Display for CorruptionFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            CorruptionKind::UniformAdditive { half_width } => write!(f, "uniform:{half_width}"),
            CorruptionKind::MagnitudeScaled { exponent } => write!(f, "mag:{exponent}"),
            CorruptionKind::AdversarialConsistent { offset_scale } => {
                write!(f, "adversarial:{offset_scale}")
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Matrix ensemble.
    #[arg(long, value_enum, default_value_t = ModelFlag::Gaussian)]
    pub model: ModelFlag,

    /// Number of rows (equations).
    #[arg(long, default_value_t = 2000)]
    pub rows: usize,

    /// Number of columns (unknowns).
    #[arg(long, default_value_t = 100)]
    pub cols: usize,

    /// Corrupted fraction of rows, in [0, 1).
    #[arg(long, default_value_t = 0.2)]
    pub beta: f64,

    /// Corruption model, e.g. uniform:5, mag:2, or adversarial:1.
    #[arg(long, default_value = "uniform:5")]
    pub corruption: CorruptionFlag,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Output directory; created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Matrix file (MatrixMarket array/coordinate, or headerless CSV).
    #[arg(long)]
    pub matrix: PathBuf,

    /// Right-hand side file (one value per line, or a one-column MatrixMarket array).
    #[arg(long)]
    pub rhs: PathBuf,

    /// Planted solution; enables relative-error reporting and opt-sgd.
    #[arg(long)]
    pub x_star: Option<PathBuf>,

    /// Solver: rk, quantile-rk, quantile-sgd, or opt-sgd.
    #[arg(long, default_value = "quantile-rk")]
    pub method: Method,

    /// Quantile level in (0, 1]; defaults to 0.7 for quantile-rk and 0.5 for
    /// quantile-sgd.
    #[arg(long)]
    pub quantile: Option<f64>,

    /// Residuals sampled per iteration for the threshold (0 = use every row
    /// exactly). Conflicts with --window.
    #[arg(long, conflicts_with = "window")]
    pub sample_size: Option<usize>,

    /// Sliding-window threshold: keep this many recent residual magnitudes.
    #[arg(long)]
    pub window: Option<usize>,

    /// Fresh residual draws pushed into the sliding window per iteration.
    #[arg(long, default_value_t = 1, requires = "window")]
    pub refresh: usize,

    #[arg(long, default_value_t = 2000)]
    pub iterations: usize,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Stop early once the relative error falls below this (needs --x-star).
    #[arg(long)]
    pub target_rel_error: Option<f64>,

    /// Scale rows (and rhs entries) to unit norm on ingestion; near-zero rows
    /// are dropped. Pass --normalize=false for data that is already unit-norm.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub normalize: bool,

    /// Trace CSV path.
    #[arg(long, default_value = "trace.csv")]
    pub out: PathBuf,

    /// Also write the final iterate as a one-column CSV.
    #[arg(long)]
    pub solution: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// One of: quantile-sweep, convergence, aspect-ratio, corruption-size,
    /// real-data.
    #[arg(long)]
    pub sweep: String,

    /// Flat key-value JSON file with sweep parameters; flags override it.
    #[arg(long)]
    pub spec: Option<PathBuf>,

    /// Output CSV path (default: <sweep>.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub model: Option<ModelFlag>,

    #[arg(long)]
    pub rows: Option<usize>,

    #[arg(long)]
    pub cols: Option<usize>,

    /// Corrupted fraction for sweeps with a fixed support size.
    #[arg(long)]
    pub beta: Option<f64>,

    #[arg(long)]
    pub corruption: Option<CorruptionFlag>,

    #[arg(long)]
    pub iterations: Option<usize>,

    /// Independent repetitions; medians are reported across trials.
    #[arg(long)]
    pub trials: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Residuals sampled per iteration for thresholds (0 = every row).
    #[arg(long, conflicts_with = "window")]
    pub sample_size: Option<usize>,

    /// Sliding-window length replacing per-iteration sampling.
    #[arg(long)]
    pub window: Option<usize>,

    /// Window draws per iteration (only with --window).
    #[arg(long, requires = "window")]
    pub refresh: Option<usize>,

    /// Quantile for the gated projection method.
    #[arg(long)]
    pub quantile_rk: Option<f64>,

    /// Quantile for the sign-step method.
    #[arg(long)]
    pub quantile_sgd: Option<f64>,

    /// Ingested matrix for the real-data sweep.
    #[arg(long)]
    pub matrix: Option<PathBuf>,

    /// Ingested right-hand side for the real-data sweep.
    #[arg(long)]
    pub rhs: Option<PathBuf>,

    /// Reference solution for the real-data sweep.
    #[arg(long)]
    pub x_star: Option<PathBuf>,

    /// Rows to corrupt (count, not fraction) in the real-data sweep.
    #[arg(long)]
    pub corrupt_count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// One of: quantile-sandwich, quantile-bounds, submatrix, eta-approx,
    /// streaming-feasible, or all.
    #[arg(long)]
    pub check: String,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Also write the JSON report here (it always goes to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Quantile level where a check takes one.
    #[arg(long)]
    pub q: Option<f64>,

    /// Corruption fraction where a check takes one.
    #[arg(long)]
    pub beta: Option<f64>,

    /// Row-fraction parameter for submatrix and count-bound checks.
    #[arg(long)]
    pub alpha: Option<f64>,

    #[arg(long)]
    pub model: Option<ModelFlag>,

    #[arg(long)]
    pub rows: Option<usize>,

    #[arg(long)]
    pub cols: Option<usize>,

    /// Number of randomized systems for the ensemble checks.
    #[arg(long)]
    pub systems: Option<usize>,

    /// Randomized repetitions inside each check.
    #[arg(long)]
    pub trials: Option<usize>,

    /// Sample points for the step-size approximation check.
    #[arg(long)]
    pub samples: Option<usize>,
}
