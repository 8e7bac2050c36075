use crate::error::{Error, Result};

/// Index of the order statistic backing the q-quantile of a multiset of the
/// given size: k = max(1, floor(q * size)), 1-based.
///
/// The floor is taken with a tiny upward nudge so that decimal q values whose
/// product lands a rounding error below an integer (e.g. 0.29 * 100) still
/// select the intended entry.
fn order_index(size: usize, q: f64) -> usize {
    let k = (q * size as f64 + 1e-9).floor() as usize;
    k.clamp(1, size)
}

/// q-quantile of a multiset: the floor(q*|S|)-th smallest entry, clamped to
/// the smallest when the index would be 0. Duplicates count separately.
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyMultiset);
    }
    if !(q > 0.0 && q <= 1.0) || !q.is_finite() {
        return Err(Error::QuantileOutOfRange { q });
    }
    let mut scratch = values.to_vec();
    Ok(quantile_in_place(&mut scratch, q))
}

/// Selection on a caller-owned scratch buffer (reordered in place); lets the
/// solver loop reuse one allocation across iterations. Preconditions checked
/// by the public wrapper.
#[inline]
pub(crate) fn quantile_in_place(scratch: &mut [f64], q: f64) -> f64 {
    debug_assert!(!scratch.is_empty() && q > 0.0 && q <= 1.0);
    let k = order_index(scratch.len(), q);
    let (_, kth, _) = scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
    *kth
}
