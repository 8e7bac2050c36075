//! Row-action solvers.
//!
//! All four methods share the same skeleton — draw a row, move `x` using only
//! that row — and differ in how far they move and whether they move at all:
//!
//! * `rk`: always project onto the drawn row's hyperplane.
//! * `quantile-rk`: estimate a quantile of the residual magnitudes first and
//!   project only if the drawn row's residual is within it. Corrupted rows
//!   have outsized residuals near the solution, so they stop being acted on.
//! * `quantile-sgd`: take a step of length equal to the estimated quantile,
//!   against the sign of the drawn row's residual. The step length shrinks
//!   with the true error, which is what keeps it convergent without a
//!   schedule.
//! * `opt-sgd`: oracle baseline; uses the true solution to compute the step
//!   size minimizing the expected squared error of the next iterate.
//!
//! Thresholds come from a [`QuantileEstimator`] configured by
//! [`ThresholdRule`]; per-iteration history lands in an [`IterationTrace`].

mod config;
mod estimator;
mod solve;
mod trace;

pub use config::{
    Method, SolverConfig, ThresholdRule, DEFAULT_Q_RK, DEFAULT_Q_SGD, DEFAULT_SAMPLE_SIZE,
    DEFAULT_WINDOW,
};
pub use estimator::QuantileEstimator;
pub use solve::{
    opt_sgd_step_size, quantile_rk_iteration, quantile_sgd_iteration, solve, solver_rng,
};
pub use trace::{IterationTrace, TraceRow, TRACE_CSV_HEADER};
