use serde::Serialize;

use crate::error::Result;
use crate::linalg::quantile;
use crate::problem::CorruptedSystem;

/// The three residual statistics that drive threshold selection, all at a
/// fixed iterate x: the quantile the solver can actually compute (against the
/// observed, possibly corrupted rhs), the quantile it wishes it could compute
/// (against the clean rhs), and the mean absolute clean residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualStats {
    pub corrupted_quantile: f64,
    pub clean_quantile: f64,
    pub mean_abs: f64,
}

pub fn residual_stats(system: &CorruptedSystem, x: &[f64], q: f64) -> Result<ResidualStats> {
    let corrupted = system.residual_magnitudes(x);
    let clean = system.clean_residual_magnitudes(x);
    let corrupted_quantile = quantile(&corrupted, q)?;
    let clean_quantile = quantile(&clean, q)?;
    let mean_abs = clean.iter().sum::<f64>() / clean.len() as f64;
    Ok(ResidualStats {
        corrupted_quantile,
        clean_quantile,
        mean_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseMatrix, Vector};
    use crate::problem::{build_system, CorruptionModel, MatrixKind, MatrixModel};

    fn hand_system() -> CorruptedSystem {
        CorruptedSystem {
            a: DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap(),
            b: Vector::zeros(2),
            b_clean: Vector::zeros(2),
            x_star: Vector::zeros(2),
            corrupt_support: vec![],
            beta: 0.0,
        }
    }

    #[test]
    fn hand_arithmetic_on_two_axis_rows() {
        let sys = hand_system();
        let stats = residual_stats(&sys, &[3.0, 4.0], 1.0).unwrap();
        assert_eq!(stats.mean_abs, 3.5);
        assert_eq!(stats.clean_quantile, 4.0);
        assert_eq!(stats.corrupted_quantile, 4.0);
    }

    #[test]
    fn all_zero_at_the_solution_without_corruption() {
        let sys = hand_system();
        let stats = residual_stats(&sys, &[0.0, 0.0], 0.5).unwrap();
        assert_eq!(stats.corrupted_quantile, 0.0);
        assert_eq!(stats.clean_quantile, 0.0);
        assert_eq!(stats.mean_abs, 0.0);
    }

    #[test]
    fn consistent_system_makes_both_quantiles_identical() {
        let sys = build_system(
            &MatrixModel {
                kind: MatrixKind::GaussianNormalized,
                rows: 80,
                cols: 7,
                seed: 5,
            },
            &CorruptionModel::uniform(0.0, 1.0),
        )
        .unwrap();
        for (i, x) in [[0.0; 7], [1.5; 7], [-0.3; 7]].iter().enumerate() {
            for q in [0.1, 0.5, 0.9, 1.0] {
                let stats = residual_stats(&sys, x, q).unwrap();
                assert_eq!(
                    stats.corrupted_quantile, stats.clean_quantile,
                    "x case {i}, q = {q}"
                );
            }
        }
    }

    #[test]
    fn q_one_is_the_max_residual() {
        let sys = build_system(
            &MatrixModel {
                kind: MatrixKind::GaussianNormalized,
                rows: 60,
                cols: 5,
                seed: 9,
            },
            &CorruptionModel::uniform(0.25, 4.0),
        )
        .unwrap();
        let x = [0.4, -1.0, 2.0, 0.0, 0.1];
        let stats = residual_stats(&sys, &x, 1.0).unwrap();
        let max = sys
            .residual_magnitudes(&x)
            .into_iter()
            .fold(0.0f64, f64::max);
        assert_eq!(stats.corrupted_quantile, max);
    }
}
