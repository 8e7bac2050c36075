//! Residual statistics, convergence-rate fitting, and empirical checks of
//! the probabilistic facts the solvers rely on.

mod checks;
mod rate;
mod residual;

pub use checks::{
    check_eta_approximation, check_quantile_bounds, check_quantile_sandwich,
    check_submatrix_conditioning, EtaReport, QuantileBoundsReport, SandwichReport,
    SubmatrixReport, ETA_GAP_TOLERANCE,
};
pub use rate::{fit_rate, RateFit, MIN_FIT_POINTS};
pub use residual::{residual_stats, ResidualStats};
