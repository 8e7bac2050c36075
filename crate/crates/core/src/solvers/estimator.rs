use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot_unchecked, quantile, quantile_in_place, DenseMatrix};
use crate::solvers::ThresholdRule;

/// Produces the residual-quantile threshold each iteration, per the
/// configured rule. Only the sliding-window rule carries state: a bounded
/// FIFO of residual magnitudes collected across iterations.
#[derive(Debug, Clone)]
pub struct QuantileEstimator {
    rule: ThresholdRule,
    buffer: VecDeque<f64>,
    scratch: Vec<f64>,
}

impl QuantileEstimator {
    pub fn new(rule: ThresholdRule) -> Self {
        let cap = match rule {
            ThresholdRule::SlidingWindow { window, .. } => window,
            _ => 0,
        };
        QuantileEstimator {
            rule,
            buffer: VecDeque::with_capacity(cap),
            scratch: Vec::new(),
        }
    }

    pub fn rule(&self) -> ThresholdRule {
        self.rule
    }

    /// Appends residual magnitudes to the window, evicting the oldest entries
    /// beyond capacity. Meaningful only for the sliding-window rule; the
    /// stateless rules ignore pushes.
    pub fn push(&mut self, values: &[f64]) {
        if let ThresholdRule::SlidingWindow { window, .. } = self.rule {
            for &v in values {
                debug_assert!(v >= 0.0);
                if self.buffer.len() == window {
                    self.buffer.pop_front();
                }
                self.buffer.push_back(v);
            }
        }
    }

    /// Quantile of the buffered values. Errors while the window is still
    /// empty (prevented in the solve loop by warm-up).
    pub fn threshold(&self, q: f64) -> Result<f64> {
        if self.buffer.is_empty() {
            return Err(Error::EmptyMultiset);
        }
        let values: Vec<f64> = self.buffer.iter().copied().collect();
        quantile(&values, q)
    }

    pub fn buffered(&self) -> usize {
        self.buffer.len()
    }

    /// Runs one iteration's worth of sampling at the current iterate and
    /// returns the threshold. Draw order is fixed (sample indices first, RK
    /// index afterwards in the caller) so traces reproduce exactly.
    pub(crate) fn next_threshold<R: Rng>(
        &mut self,
        a: &DenseMatrix,
        b: &[f64],
        x: &[f64],
        q: f64,
        rng: &mut R,
    ) -> f64 {
        let m = a.nrows();
        let residual_at = |i: usize| (dot_unchecked(a.row_unchecked(i), x) - b[i]).abs();
        match self.rule {
            ThresholdRule::FullResidual => {
                self.scratch.clear();
                self.scratch.extend((0..m).map(residual_at));
            }
            ThresholdRule::FreshSample { t } => {
                self.scratch.clear();
                self.scratch
                    .extend((0..t).map(|_| residual_at(rng.random_range(0..m))));
            }
            ThresholdRule::SlidingWindow { window, refresh } => {
                // Warm-up fills the whole window so the threshold is defined
                // from the first iteration on.
                let fresh = if self.buffer.is_empty() { window } else { refresh };
                for _ in 0..fresh {
                    let v = residual_at(rng.random_range(0..m));
                    if self.buffer.len() == window {
                        self.buffer.pop_front();
                    }
                    self.buffer.push_back(v);
                }
                self.scratch.clear();
                self.scratch.extend(self.buffer.iter().copied());
            }
        }
        quantile_in_place(&mut self.scratch, q)
    }
}
