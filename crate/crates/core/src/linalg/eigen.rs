use crate::error::{Error, Result};
use crate::linalg::matrix::DenseMatrix;

const MAX_SWEEPS: usize = 30;

/// Smallest singular value of a tall matrix, computed as the square root of
/// the smallest eigenvalue of the n x n Gram matrix A^T A. Cyclic Jacobi is
/// plenty at desk-scale n and keeps the whole solver dependency-free.
///
/// Accuracy is limited by forming the Gram matrix: eigenvalues carry an
/// absolute error of a few ulps of ||A||^2, so tiny singular values of badly
/// scaled matrices flatten to ~1e-8 * ||A||. That is exactly the regime the
/// conditioning diagnostics care about (ratios near zero), so it is fine.
pub fn smallest_singular_value(a: &DenseMatrix) -> Result<f64> {
    if a.nrows() < a.ncols() {
        return Err(Error::NotTall {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let mut gram = a.gram();
    let eigs = jacobi_eigenvalues(&mut gram)?;
    let lambda_min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(lambda_min.max(0.0).sqrt())
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations. The matrix
/// is consumed as scratch space. Off-diagonal mass shrinks quadratically once
/// small; 30 sweeps is far beyond what desk-scale Gram matrices need.
pub(crate) fn jacobi_eigenvalues(g: &mut DenseMatrix) -> Result<Vec<f64>> {
    let n = g.nrows();
    debug_assert_eq!(n, g.ncols());
    if n == 1 {
        return Ok(vec![g.get(0, 0)]);
    }
    let scale = g.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += g.get(p, q) * g.get(p, q);
            }
        }
        if (2.0 * off).sqrt() <= 1e-15 * scale {
            return Ok((0..n).map(|i| g.get(i, i)).collect());
        }

        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let gpq = g.get(p, q);
                if gpq.abs() <= 1e-300 {
                    g.set(p, q, 0.0);
                    g.set(q, p, 0.0);
                    continue;
                }
                let theta = (g.get(q, q) - g.get(p, p)) / (2.0 * gpq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                g.set(p, p, g.get(p, p) - t * gpq);
                g.set(q, q, g.get(q, q) + t * gpq);
                g.set(p, q, 0.0);
                g.set(q, p, 0.0);
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let gip = g.get(i, p);
                    let giq = g.get(i, q);
                    let new_ip = gip - s * (giq + tau * gip);
                    let new_iq = giq + s * (gip - tau * giq);
                    g.set(i, p, new_ip);
                    g.set(p, i, new_ip);
                    g.set(i, q, new_iq);
                    g.set(q, i, new_iq);
                }
            }
        }
    }
    Err(Error::JacobiNoConvergence { sweeps: MAX_SWEEPS })
}
