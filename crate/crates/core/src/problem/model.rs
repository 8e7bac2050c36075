use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Random matrix families used by the synthetic experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    /// Rows i.i.d. standard normal, then normalized: uniform on the sphere.
    GaussianNormalized,
    /// Entries i.i.d. Uniform[0,1), rows normalized. Highly coherent: all
    /// rows point into the positive orthant.
    CoherentUniform,
    /// Entries i.i.d. +-1, rows scaled by 1/sqrt(n) exactly.
    BernoulliNormalized,
}

/// Shape, family, and seed of a generated matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixModel {
    pub kind: MatrixKind,
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
}

impl MatrixModel {
    pub fn validate(&self) -> Result<()> {
        if self.cols < 1 || self.rows < self.cols {
            return Err(Error::BadDomain {
                reason: format!(
                    "matrix model needs rows >= cols >= 1, got {}x{}",
                    self.rows, self.cols
                ),
            });
        }
        Ok(())
    }
}

/// How many equations get corrupted: a fraction of m (floored) or an absolute
/// count. The count form exists for ingested systems specified as "corrupt K
/// entries".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportSize {
    Fraction(f64),
    Count(usize),
}

impl SupportSize {
    /// Number of corrupted rows for a system of m rows.
    pub fn resolve(&self, m: usize) -> Result<usize> {
        let k = match *self {
            SupportSize::Fraction(beta) => {
                if !(0.0..1.0).contains(&beta) {
                    return Err(Error::BetaOutOfRange { beta });
                }
                // Same upward nudge as the quantile index: decimal fractions
                // must not lose a row to floating-point floor.
                (beta * m as f64 + 1e-9).floor() as usize
            }
            SupportSize::Count(k) => k,
        };
        if k >= m {
            return Err(Error::CorruptionCountTooLarge { count: k, rows: m });
        }
        Ok(k)
    }
}

/// Corruption placed on the selected rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorruptionKind {
    /// b_i += Uniform[-c, c], resampled away from exactly zero.
    UniformAdditive { half_width: f64 },
    /// Uniform additive with half-width 10^exponent.
    MagnitudeScaled { exponent: f64 },
    /// b_i = <a_i, x_adv> for a phantom solution x_adv = x_star + s*u, u
    /// uniform on the unit sphere: the corrupted subsystem is itself exactly
    /// consistent, the hardest case for residual-based detection.
    AdversarialConsistent { offset_scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorruptionModel {
    pub kind: CorruptionKind,
    pub support: SupportSize,
}

impl CorruptionModel {
    pub fn uniform(beta: f64, half_width: f64) -> Self {
        CorruptionModel {
            kind: CorruptionKind::UniformAdditive { half_width },
            support: SupportSize::Fraction(beta),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            CorruptionKind::UniformAdditive { half_width } => {
                if !(half_width > 0.0) || !half_width.is_finite() {
                    return Err(Error::BadDomain {
                        reason: format!("uniform-additive half-width must be > 0, got {half_width}"),
                    });
                }
            }
            CorruptionKind::MagnitudeScaled { exponent } => {
                if !exponent.is_finite() {
                    return Err(Error::BadDomain {
                        reason: "magnitude-scaled exponent must be finite".into(),
                    });
                }
            }
            CorruptionKind::AdversarialConsistent { offset_scale } => {
                if !(offset_scale > 0.0) || !offset_scale.is_finite() {
                    return Err(Error::BadDomain {
                        reason: format!("adversarial offset scale must be > 0, got {offset_scale}"),
                    });
                }
            }
        }
        if let SupportSize::Fraction(beta) = self.support {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::BetaOutOfRange { beta });
            }
        }
        Ok(())
    }
}
