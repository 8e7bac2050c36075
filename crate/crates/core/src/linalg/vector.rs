use crate::error::{Error, Result};

/// Dense real vector. Entries are always finite; constructors enforce this so
/// downstream arithmetic never has to re-check for NaN/Inf.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    /// Builds a vector, rejecting NaN and infinities up front.
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "vector entries",
            });
        }
        Ok(Vector { data })
    }

    pub fn zeros(n: usize) -> Self {
        Vector { data: vec![0.0; n] }
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_raw(data: Vec<f64>) -> Self {
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Vector { data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }
}

impl std::ops::Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.data
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

/// Inner product. Errors when lengths differ.
pub fn dot(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(dot_unchecked(x, y))
}

#[inline]
pub(crate) fn dot_unchecked(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for i in 0..x.len() {
        acc += x[i] * y[i];
    }
    acc
}

/// Euclidean norm.
pub fn norm(x: &[f64]) -> f64 {
    dot_unchecked(x, x).sqrt()
}

/// Sign with the convention sign(0) = -1. The zero-residual case is a
/// measure-zero event but has to be deterministic for trace reproducibility.
#[inline]
pub fn residual_sign(r: f64) -> f64 {
    if r > 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn check_row_args(x: &[f64], a: &[f64]) -> Result<()> {
    if x.len() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: a.len(),
        });
    }
    let na = norm(a);
    if (na - 1.0).abs() > 1e-9 {
        return Err(Error::BadDomain {
            reason: format!("row must be unit-norm, got norm {na}"),
        });
    }
    Ok(())
}

/// Orthogonal projection of `x` onto the hyperplane `<a, z> = b` for a unit row
/// `a`: returns x + (b - <a,x>) a.
pub fn project_row(x: &[f64], a: &[f64], b: f64) -> Result<Vector> {
    check_row_args(x, a)?;
    let mut out = x.to_vec();
    project_row_mut(&mut out, a, b);
    Ok(Vector::from_raw(out))
}

/// In-place projection; returns the pre-step residual <a,x> - b.
#[inline]
pub(crate) fn project_row_mut(x: &mut [f64], a: &[f64], b: f64) -> f64 {
    let r = dot_unchecked(a, x) - b;
    for i in 0..x.len() {
        x[i] -= r * a[i];
    }
    r
}

/// Fixed-length step against the residual sign: x - gamma * sign(<a,x> - b) a.
pub fn sign_step(x: &[f64], a: &[f64], b: f64, gamma: f64) -> Result<Vector> {
    check_row_args(x, a)?;
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::BadDomain {
            reason: format!("step size gamma must be finite and nonnegative, got {gamma}"),
        });
    }
    let mut out = x.to_vec();
    sign_step_mut(&mut out, a, b, gamma);
    Ok(Vector::from_raw(out))
}

/// In-place sign step; returns the pre-step residual <a,x> - b.
#[inline]
pub(crate) fn sign_step_mut(x: &mut [f64], a: &[f64], b: f64, gamma: f64) -> f64 {
    let r = dot_unchecked(a, x) - b;
    let s = residual_sign(r);
    for i in 0..x.len() {
        x[i] -= gamma * s * a[i];
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_and_norm_basics() {
        assert_eq!(dot(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
        assert_eq!(norm(&[3.0, 4.0]), 5.0);
        assert!(dot(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn vector_rejects_non_finite() {
        assert!(Vector::new(vec![1.0, f64::NAN]).is_err());
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![]).unwrap().is_empty());
    }

    #[test]
    fn projection_axis_aligned() {
        let out = project_row(&[0.0, 0.0], &[1.0, 0.0], 2.0).unwrap();
        assert_eq!(out.as_slice(), &[2.0, 0.0]);
    }

    #[test]
    fn projection_leaves_points_on_the_hyperplane() {
        let x = [0.3, -1.7];
        let out = project_row(&x, &[0.0, 1.0], -1.7).unwrap();
        assert_eq!(out.as_slice(), &x);
    }

    #[test]
    fn projection_diagonal_hand_case() {
        // x = (1,1) onto <(1,1)/sqrt(2), z> = 0 lands at the origin.
        let s = 1.0 / 2.0f64.sqrt();
        let out = project_row(&[1.0, 1.0], &[s, s], 0.0).unwrap();
        assert!(out[0].abs() < 1e-15 && out[1].abs() < 1e-15);
    }

    #[test]
    fn projection_satisfies_the_constraint() {
        let a = [0.6, 0.8];
        let b = -3.25;
        let out = project_row(&[10.0, -4.0], &a, b).unwrap();
        assert!((dot(&a, &out).unwrap() - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn projection_idempotent() {
        let a = [0.6, 0.8];
        let once = project_row(&[2.0, 5.0], &a, 1.5).unwrap();
        let twice = project_row(&once, &a, 1.5).unwrap();
        for i in 0..2 {
            assert!((once[i] - twice[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn projection_rejects_unnormalized_rows() {
        assert!(project_row(&[0.0, 0.0], &[2.0, 0.0], 1.0).is_err());
        assert!(project_row(&[0.0], &[1.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn sign_step_positive_residual() {
        let out = sign_step(&[1.0, 0.0], &[1.0, 0.0], 0.0, 0.5).unwrap();
        assert_eq!(out.as_slice(), &[0.5, 0.0]);
    }

    #[test]
    fn sign_step_zero_residual_uses_minus_one() {
        // sign(0) = -1, so the step moves along +a.
        let out = sign_step(&[0.0, 0.0], &[1.0, 0.0], 0.0, 1.0).unwrap();
        assert_eq!(out.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn sign_step_zero_gamma_is_identity() {
        let out = sign_step(&[0.4, -0.2], &[1.0, 0.0], 7.0, 0.0).unwrap();
        assert_eq!(out.as_slice(), &[0.4, -0.2]);
    }

    #[test]
    fn sign_step_rejects_negative_gamma() {
        assert!(sign_step(&[0.0], &[1.0], 0.0, -0.1).is_err());
    }
}
