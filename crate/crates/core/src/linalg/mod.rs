//! Dense vectors and matrices, multiset quantiles, and the one eigen routine
//! the diagnostics need. Everything is f64, row-major, and allocation-light;
//! no external linear algebra backend.

mod eigen;
mod matrix;
mod quantile;
mod vector;

pub use eigen::smallest_singular_value;
pub use matrix::DenseMatrix;
pub use quantile::quantile;
pub use vector::{dot, norm, project_row, residual_sign, sign_step, Vector};

pub(crate) use quantile::quantile_in_place;
pub(crate) use vector::{dot_unchecked, project_row_mut, sign_step_mut};
