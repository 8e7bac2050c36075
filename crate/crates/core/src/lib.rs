//! Randomized Kaczmarz and sign-SGD solvers hardened against sparsely
//! corrupted right-hand sides, plus the tooling around them: problem
//! generation, quantile threshold estimation, a streaming (one-pass) variant,
//! and theory-facing diagnostics.
//!
//! The core idea: per iteration, estimate a quantile of the current residual
//! magnitudes and use it either as an acceptance gate for Kaczmarz projections
//! or as the step size of a sign step. Corrupted equations produce outsized
//! residuals, so quantile thresholds route updates around them without knowing
//! which equations are bad.

pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod problem;
pub mod rng;
pub mod solvers;
pub mod streaming;

pub use error::{Error, Result};
pub use linalg::{quantile, smallest_singular_value, DenseMatrix, Vector};
pub use problem::{CorruptionModel, CorruptedSystem, MatrixModel};
pub use solvers::{Method, SolverConfig, ThresholdRule};
