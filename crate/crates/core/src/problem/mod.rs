//! Problem construction: random matrix models, corruption models, planted
//! solutions, and file ingestion for real systems.

mod generate;
mod io;
mod model;
mod system;

pub use generate::{generate_matrix, make_consistent_rhs};
pub use io::{
    load_system, read_matrix, read_vector, write_csv_column, write_index_column,
    write_matrix_market, LoadedSystem,
};
pub use model::{CorruptionKind, CorruptionModel, MatrixKind, MatrixModel, SupportSize};
pub use system::{build_system, build_system_for_trial, corrupt, CorruptedSystem};

pub(crate) use generate::unit_sphere_vector;
