use thiserror::Error;

/// Errors shared across the library.
///
/// Numeric routines keep their preconditions narrow and fail loudly instead of
/// propagating NaN; every variant message says what broke and with which sizes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty multiset")]
    EmptyMultiset,

    #[error("quantile out of range: q = {q} not in (0, 1]")]
    QuantileOutOfRange { q: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("row index {index} out of range for {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },

    #[error("matrix must be tall (rows >= cols), got {rows}x{cols}")]
    NotTall { rows: usize, cols: usize },

    #[error("matrix must have at least one row and one column, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("cannot normalize row {row}: norm {norm:e} below 1e-14")]
    ZeroRow { row: usize, norm: f64 },

    #[error("Jacobi eigenvalue iteration did not converge in {sweeps} sweeps")]
    JacobiNoConvergence { sweeps: usize },

    #[error("corruption rate out of range: beta = {beta} must satisfy 0 <= beta < 1")]
    BetaOutOfRange { beta: f64 },

    #[error("corruption count {count} must be < number of rows {rows}")]
    CorruptionCountTooLarge { count: usize, rows: usize },

    #[error("invalid solver configuration: {reason}")]
    InvalidConfig { reason: String },

    #[error("x_star required: {reason}")]
    MissingXStar { reason: &'static str },

    #[error("trace too short: need at least {needed} usable points after burn-in, got {got}")]
    TraceTooShort { needed: usize, got: usize },

    #[error("infeasible parameter domain: {reason}")]
    BadDomain { reason: String },

    #[error("submatrix of size {subset} x {cols} is not tall; increase alpha")]
    SubmatrixNotTall { subset: usize, cols: usize },

    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path} line {line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
