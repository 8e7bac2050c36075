use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Iterative methods. `Rk` projects blindly; the quantile methods gate or
/// scale their update by a residual-quantile estimate; `OptSgd` is the oracle
/// baseline that needs the true solution to compute its step size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Rk,
    QuantileRk,
    QuantileSgd,
    OptSgd,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Rk => "rk",
            Method::QuantileRk => "quantile-rk",
            Method::QuantileSgd => "quantile-sgd",
            Method::OptSgd => "opt-sgd",
        }
    }

    pub fn uses_quantile(&self) -> bool {
        matches!(self, Method::QuantileRk | Method::QuantileSgd)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk" => Ok(Method::Rk),
            "quantile-rk" => Ok(Method::QuantileRk),
            "quantile-sgd" => Ok(Method::QuantileSgd),
            "opt-sgd" => Ok(Method::OptSgd),
            other => Err(Error::InvalidConfig {
                reason: format!(
                    "unknown method '{other}' (expected rk, quantile-rk, quantile-sgd, opt-sgd)"
                ),
            }),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the per-iteration quantile threshold comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdRule {
    /// Quantile over all m residuals, recomputed every iteration. This is the
    /// regime the convergence guarantees are stated in; O(mn) per iteration.
    FullResidual,
    /// Quantile over t residuals at indices drawn uniformly with replacement,
    /// fresh each iteration.
    FreshSample { t: usize },
    /// FIFO window over residual magnitudes collected across iterations: the
    /// first iteration fills all `window` slots, after that `refresh` fresh
    /// draws replace the oldest entries. `refresh = 1` is the cheap variant
    /// that makes the window worthwhile.
    SlidingWindow { window: usize, refresh: usize },
}

impl ThresholdRule {
    pub fn validate(&self, m: usize) -> Result<()> {
        match *self {
            ThresholdRule::FullResidual => Ok(()),
            ThresholdRule::FreshSample { t } => {
                if t < 1 {
                    return Err(Error::InvalidConfig {
                        reason: "sample size t must be >= 1".into(),
                    });
                }
                Ok(())
            }
            ThresholdRule::SlidingWindow { window, refresh } => {
                if window < 1 {
                    return Err(Error::InvalidConfig {
                        reason: "window size must be >= 1".into(),
                    });
                }
                if refresh < 1 || refresh > window {
                    return Err(Error::InvalidConfig {
                        reason: format!(
                            "window refresh must be in 1..={window}, got {refresh}"
                        ),
                    });
                }
                let _ = m;
                Ok(())
            }
        }
    }
}

/// Everything a solve run needs besides the system itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    /// Quantile level for the threshold (quantile methods only).
    pub q: f64,
    pub threshold: ThresholdRule,
    /// Iteration budget N; the trace has N+1 rows unless stopped early.
    pub iterations: usize,
    pub seed: u64,
    /// Stop once the relative error reaches this (needs x_star).
    pub target_rel_error: Option<f64>,
    /// Starting iterate; the origin when absent.
    #[serde(skip)]
    pub x0: Option<Vector>,
    /// Clamp the oracle step size at zero from below. Off by default: the
    /// optimality derivation prescribes the raw value even when negative.
    pub clamp_step: bool,
}

pub const DEFAULT_Q_RK: f64 = 0.7;
pub const DEFAULT_Q_SGD: f64 = 0.5;
pub const DEFAULT_SAMPLE_SIZE: usize = 400;
pub const DEFAULT_WINDOW: usize = 400;

impl SolverConfig {
    pub fn rk(iterations: usize, seed: u64) -> Self {
        SolverConfig {
            method: Method::Rk,
            q: 1.0,
            threshold: ThresholdRule::FullResidual,
            iterations,
            seed,
            target_rel_error: None,
            x0: None,
            clamp_step: false,
        }
    }

    pub fn quantile_rk(q: f64, iterations: usize, seed: u64) -> Self {
        SolverConfig {
            method: Method::QuantileRk,
            q,
            threshold: ThresholdRule::FreshSample {
                t: DEFAULT_SAMPLE_SIZE,
            },
            ..SolverConfig::rk(iterations, seed)
        }
    }

    pub fn quantile_sgd(q: f64, iterations: usize, seed: u64) -> Self {
        SolverConfig {
            method: Method::QuantileSgd,
            q,
            threshold: ThresholdRule::FreshSample {
                t: DEFAULT_SAMPLE_SIZE,
            },
            ..SolverConfig::rk(iterations, seed)
        }
    }

    pub fn opt_sgd(iterations: usize, seed: u64) -> Self {
        SolverConfig {
            method: Method::OptSgd,
            ..SolverConfig::rk(iterations, seed)
        }
    }

    pub fn with_threshold(mut self, rule: ThresholdRule) -> Self {
        self.threshold = rule;
        self
    }

    pub fn with_x0(mut self, x0: Vector) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.method.uses_quantile() {
            if !(self.q > 0.0 && self.q <= 1.0) || !self.q.is_finite() {
                return Err(Error::QuantileOutOfRange { q: self.q });
            }
            self.threshold.validate(m)?;
        }
        if let Some(t) = self.target_rel_error {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::InvalidConfig {
                    reason: format!("target relative error must be > 0, got {t}"),
                });
            }
        }
        Ok(())
    }
}
