use crate::error::{Error, Result};
use crate::linalg::vector::{dot_unchecked, norm, Vector};

/// Dense row-major matrix. Solvers address it exclusively through `row`, so
/// row-major layout keeps the per-iteration access pattern contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Result<Self> {
        if nrows == 0 || ncols == 0 {
            return Err(Error::EmptyMatrix {
                rows: nrows,
                cols: ncols,
            });
        }
        Ok(DenseMatrix {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        })
    }

    /// Builds from row-major data; length must equal nrows * ncols.
    pub fn from_row_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        if nrows == 0 || ncols == 0 {
            return Err(Error::EmptyMatrix {
                rows: nrows,
                cols: ncols,
            });
        }
        if data.len() != nrows * ncols {
            return Err(Error::DimensionMismatch {
                expected: nrows * ncols,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "matrix entries",
            });
        }
        Ok(DenseMatrix { nrows, ncols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
        }
        let ncols = rows[0].len();
        for r in rows {
            if r.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: ncols,
                    got: r.len(),
                });
            }
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        DenseMatrix::from_row_major(rows.len(), ncols, data)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.nrows && j < self.ncols, "index out of range");
        self.data[i * self.ncols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.nrows && j < self.ncols, "index out of range");
        self.data[i * self.ncols + j] = v;
    }

    /// Borrow row i as a slice.
    pub fn row(&self, i: usize) -> Result<&[f64]> {
        if i >= self.nrows {
            return Err(Error::RowOutOfRange {
                index: i,
                rows: self.nrows,
            });
        }
        Ok(self.row_unchecked(i))
    }

    #[inline]
    pub(crate) fn row_unchecked(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    /// Copy row i into an owned vector.
    pub fn row_vector(&self, i: usize) -> Result<Vector> {
        Ok(Vector::from_raw(self.row(i)?.to_vec()))
    }

    /// Matrix-vector product A x.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vector> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                got: x.len(),
            });
        }
        let mut out = Vec::with_capacity(self.nrows);
        for i in 0..self.nrows {
            out.push(dot_unchecked(self.row_unchecked(i), x));
        }
        Ok(Vector::from_raw(out))
    }

    pub fn frobenius_norm(&self) -> f64 {
        dot_unchecked(&self.data, &self.data).sqrt()
    }

    /// Largest deviation of any row norm from 1; cheap normalization check for
    /// solver entry points.
    pub fn max_row_norm_deviation(&self) -> f64 {
        (0..self.nrows)
            .map(|i| (norm(self.row_unchecked(i)) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Scales every row (and the paired rhs entry) to unit norm. Rows with
    /// norm below 1e-14 cannot be normalized and are reported as errors.
    pub fn normalize_rows(&mut self, rhs: &mut [f64]) -> Result<()> {
        if rhs.len() != self.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.nrows,
                got: rhs.len(),
            });
        }
        for i in 0..self.nrows {
            let n = norm(self.row_unchecked(i));
            if n < 1e-14 {
                return Err(Error::ZeroRow { row: i, norm: n });
            }
            let inv = 1.0 / n;
            for v in self.row_mut(i) {
                *v *= inv;
            }
            rhs[i] *= inv;
        }
        Ok(())
    }

    /// Gram matrix A^T A (ncols x ncols), accumulated row by row.
    pub(crate) fn gram(&self) -> DenseMatrix {
        let n = self.ncols;
        let mut g = vec![0.0; n * n];
        for i in 0..self.nrows {
            let a = self.row_unchecked(i);
            for p in 0..n {
                let ap = a[p];
                if ap == 0.0 {
                    continue;
                }
                for q in p..n {
                    g[p * n + q] += ap * a[q];
                }
            }
        }
        for p in 0..n {
            for q in 0..p {
                g[p * n + q] = g[q * n + p];
            }
        }
        DenseMatrix {
            nrows: n,
            ncols: n,
            data: g,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates_shape_and_content() {
        assert!(DenseMatrix::zeros(0, 3).is_err());
        assert!(DenseMatrix::from_row_major(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::from_row_major(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn rows_and_products() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!(a.row(1).unwrap(), &[3.0, 4.0]);
        assert!(a.row(3).is_err());
        let y = a.mul_vec(&[1.0, -1.0]).unwrap();
        assert_eq!(y.as_slice(), &[-1.0, -1.0, -1.0]);
        assert!(a.mul_vec(&[1.0]).is_err());
    }

    #[test]
    fn frobenius_norm_of_row_normalized_matrix_is_sqrt_m() {
        // 4 unit rows in R^3.
        let s = 1.0 / 3.0f64.sqrt();
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![s, s, s],
        ])
        .unwrap();
        assert!((a.frobenius_norm() - 2.0).abs() < 1e-10);
        assert!(a.max_row_norm_deviation() < 1e-12);
    }

    #[test]
    fn normalize_rows_scales_rhs_and_rejects_zero_rows() {
        let mut a = DenseMatrix::from_rows(&[vec![3.0, 4.0], vec![0.0, 2.0]]).unwrap();
        let mut b = vec![10.0, 4.0];
        a.normalize_rows(&mut b).unwrap();
        assert!((a.get(0, 0) - 0.6).abs() < 1e-15);
        assert!((b[0] - 2.0).abs() < 1e-15);
        assert!((b[1] - 2.0).abs() < 1e-15);

        let mut z = DenseMatrix::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let mut bz = vec![1.0];
        assert!(matches!(
            z.normalize_rows(&mut bz),
            Err(crate::error::Error::ZeroRow { row: 0, .. })
        ));
    }

    #[test]
    fn gram_matches_direct_computation() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let g = a.gram();
        assert_eq!(g.get(0, 0), 35.0);
        assert_eq!(g.get(0, 1), 44.0);
        assert_eq!(g.get(1, 0), 44.0);
        assert_eq!(g.get(1, 1), 56.0);
    }
}
