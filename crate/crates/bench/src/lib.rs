//! Shared fixtures for the benchmark targets.

use qrk_core::problem::{build_system, CorruptionModel, MatrixKind, MatrixModel};
use qrk_core::CorruptedSystem;

/// The desk-scale benchmark system: Gaussian rows, uniform corruption of
/// half-width 5 on a `beta` fraction of rows.
pub fn bench_system(rows: usize, cols: usize, beta: f64) -> CorruptedSystem {
    let model = MatrixModel {
        kind: MatrixKind::GaussianNormalized,
        rows,
        cols,
        seed: 99,
    };
    build_system(&model, &CorruptionModel::uniform(beta, 5.0)).expect("benchmark system builds")
}
