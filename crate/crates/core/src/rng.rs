//! Seeding policy. Every randomized component draws from a ChaCha8 stream
//! keyed by (seed, role), so regenerating any one artifact (matrix, support,
//! corruption values, ...) never perturbs the others, and traces reproduce
//! bit-for-bit across platforms. Trials get independent seeds derived with a
//! splitmix64 mix, which lets a worker pool run them in any order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One sub-stream per consumer of randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    /// Matrix entry generation.
    Matrix = 0,
    /// Choice of corrupted row indices.
    Support = 1,
    /// Corruption magnitudes / adversarial directions.
    CorruptionValues = 2,
    /// Planted solution on the unit sphere.
    XStar = 3,
    /// Solver index and sample draws.
    Solver = 4,
    /// Streaming row/corruption draws.
    StreamingPairs = 5,
    /// Diagnostic probes (random subsets, test directions).
    Probe = 6,
}

/// RNG for one role under one seed.
pub fn role_rng(seed: u64, role: StreamRole) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(role as u64);
    rng
}

/// Independent per-trial seed. splitmix64 finalizer over (seed, trial);
/// collision-free in practice and stable across platforms.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed ^ trial.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::RngCore;

    #[test]
    fn roles_give_distinct_reproducible_streams() {
        let mut a1 = role_rng(7, StreamRole::Matrix);
        let mut a2 = role_rng(7, StreamRole::Matrix);
        let mut b = role_rng(7, StreamRole::Support);
        let x1 = a1.next_u64();
        assert_eq!(x1, a2.next_u64());
        assert_ne!(x1, b.next_u64());
    }

    #[test]
    fn trial_seeds_differ() {
        let s: Vec<u64> = (0..100).map(|t| trial_seed(42, t)).collect();
        let mut dedup = s.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), s.len());
        assert_eq!(trial_seed(42, 3), trial_seed(42, 3));
    }
}
