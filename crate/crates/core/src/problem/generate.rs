use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{norm, DenseMatrix, Vector};
use crate::rng::{role_rng, StreamRole};

/// Draws a matrix from the given model. Entry order is row-major and fixed,
/// so a (model, seed) pair reproduces the same matrix bit-for-bit.
pub fn generate_matrix(model: &crate::problem::MatrixModel) -> Result<DenseMatrix> {
    use crate::problem::MatrixKind::*;
    model.validate()?;
    let (m, n) = (model.rows, model.cols);
    let mut rng = role_rng(model.seed, StreamRole::Matrix);
    let mut a = DenseMatrix::zeros(m, n)?;

    match model.kind {
        GaussianNormalized => {
            for i in 0..m {
                let row = a.row_mut(i);
                for v in row.iter_mut() {
                    *v = rng.sample::<f64, _>(StandardNormal);
                }
                normalize_row(row, i)?;
            }
        }
        CoherentUniform => {
            for i in 0..m {
                let row = a.row_mut(i);
                for v in row.iter_mut() {
                    *v = rng.random_range(0.0..1.0);
                }
                normalize_row(row, i)?;
            }
        }
        BernoulliNormalized => {
            let scale = 1.0 / (n as f64).sqrt();
            for i in 0..m {
                for v in a.row_mut(i).iter_mut() {
                    *v = if rng.random::<bool>() { scale } else { -scale };
                }
            }
        }
    }
    Ok(a)
}

fn normalize_row(row: &mut [f64], index: usize) -> Result<()> {
    let nrm = norm(row);
    if nrm < 1e-14 {
        return Err(Error::ZeroRow {
            row: index,
            norm: nrm,
        });
    }
    let inv = 1.0 / nrm;
    for v in row.iter_mut() {
        *v *= inv;
    }
    Ok(())
}

/// Uniform draw from the unit sphere of R^n: normalized standard normals.
pub(crate) fn unit_sphere_vector<R: Rng>(n: usize, rng: &mut R) -> Vector {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let nrm = norm(&v);
        // Resample on the (practically impossible) degenerate draw instead of
        // dividing by ~0.
        if nrm > 1e-8 {
            for x in v.iter_mut() {
                *x /= nrm;
            }
            return Vector::from_raw(v);
        }
    }
}

/// Plants a solution: x_star uniform on the unit sphere, b_clean = A x_star.
pub fn make_consistent_rhs(a: &DenseMatrix, seed: u64) -> (Vector, Vector) {
    let mut rng = role_rng(seed, StreamRole::XStar);
    let x_star = unit_sphere_vector(a.ncols(), &mut rng);
    let b_clean = a.mul_vec(&x_star).expect("dimensions match by construction");
    (x_star, b_clean)
}
