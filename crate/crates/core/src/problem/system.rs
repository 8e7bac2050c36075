use rand::seq::index::sample as sample_indices;
use rand::Rng;

use crate::error::Result;
use crate::linalg::{dot_unchecked, DenseMatrix, Vector};
use crate::problem::generate::unit_sphere_vector;
use crate::problem::{CorruptionKind, CorruptionModel, MatrixModel};
use crate::rng::{role_rng, trial_seed, StreamRole};

/// A linear system with a planted solution and a sparsely corrupted
/// right-hand side. `b` is what a solver sees; `b_clean` and `x_star` exist
/// for evaluation only.
#[derive(Debug, Clone)]
pub struct CorruptedSystem {
    pub a: DenseMatrix,
    pub b: Vector,
    pub b_clean: Vector,
    pub x_star: Vector,
    /// Sorted indices of corrupted rows.
    pub corrupt_support: Vec<usize>,
    /// Fraction of corrupted rows, |support| / m.
    pub beta: f64,
}

impl CorruptedSystem {
    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn cols(&self) -> usize {
        self.a.ncols()
    }

    /// Residual magnitudes |<a_i, x> - b_i| against the observed (corrupted)
    /// right-hand side.
    pub fn residual_magnitudes(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows())
            .map(|i| (dot_unchecked(self.a.row_unchecked(i), x) - self.b[i]).abs())
            .collect()
    }

    /// Residual magnitudes against the clean right-hand side.
    pub fn clean_residual_magnitudes(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows())
            .map(|i| (dot_unchecked(self.a.row_unchecked(i), x) - self.b_clean[i]).abs())
            .collect()
    }
}

/// Corrupts ⌊beta*m⌋ (or an absolute count of) right-hand side entries of the
/// consistent system b_clean = A x_star. The support is sampled uniformly
/// without replacement; every selected entry is guaranteed to actually change.
pub fn corrupt(
    a: &DenseMatrix,
    x_star: &Vector,
    model: &CorruptionModel,
    seed: u64,
) -> Result<CorruptedSystem> {
    model.validate()?;
    let m = a.nrows();
    let count = model.support.resolve(m)?;
    let b_clean = a.mul_vec(x_star)?;

    let mut support: Vec<usize> = {
        let mut rng = role_rng(seed, StreamRole::Support);
        sample_indices(&mut rng, m, count).into_iter().collect()
    };
    support.sort_unstable();

    let mut b = b_clean.as_slice().to_vec();
    let mut rng = role_rng(seed, StreamRole::CorruptionValues);
    match model.kind {
        CorruptionKind::UniformAdditive { half_width } => {
            additive_uniform(&mut b, &support, half_width, &mut rng);
        }
        CorruptionKind::MagnitudeScaled { exponent } => {
            additive_uniform(&mut b, &support, 10f64.powf(exponent), &mut rng);
        }
        CorruptionKind::AdversarialConsistent { offset_scale } => {
            let u = unit_sphere_vector(a.ncols(), &mut rng);
            let x_adv: Vec<f64> = x_star
                .iter()
                .zip(u.iter())
                .map(|(xs, ui)| xs + offset_scale * ui)
                .collect();
            for &i in &support {
                b[i] = dot_unchecked(a.row_unchecked(i), &x_adv);
            }
        }
    }

    Ok(CorruptedSystem {
        a: a.clone(),
        b: Vector::from_raw(b),
        b_clean,
        x_star: x_star.clone(),
        corrupt_support: support,
        beta: count as f64 / m as f64,
    })
}

fn additive_uniform<R: Rng>(b: &mut [f64], support: &[usize], half_width: f64, rng: &mut R) {
    for &i in support {
        // Resample the measure-zero exact-zero draw so corrupted entries
        // always differ from the clean ones.
        let delta = loop {
            let d: f64 = rng.random_range(-half_width..half_width);
            if d != 0.0 {
                break d;
            }
        };
        b[i] += delta;
    }
}

/// Convenience builder used by the CLI and experiments: matrix, planted
/// solution, and corruption all derived from one seed via role streams.
pub fn build_system(
    matrix_model: &MatrixModel,
    corruption: &CorruptionModel,
) -> Result<CorruptedSystem> {
    let a = crate::problem::generate_matrix(matrix_model)?;
    let (x_star, _) = crate::problem::make_consistent_rhs(&a, matrix_model.seed);
    corrupt(&a, &x_star, corruption, matrix_model.seed)
}

/// Same builder with the seed replaced by a derived per-trial seed.
pub fn build_system_for_trial(
    matrix_model: &MatrixModel,
    corruption: &CorruptionModel,
    trial: u64,
) -> Result<CorruptedSystem> {
    let seeded = MatrixModel {
        seed: trial_seed(matrix_model.seed, trial),
        ..*matrix_model
    };
    build_system(&seeded, corruption)
}
