//! Stable seed derivation.
//!
//! Every random stream in a run (initial genomes, per-generation operators,
//! fitness episodes, test episodes) is keyed by a seed derived from the base
//! seed and a short path of integers. The mixing function is SplitMix64's
//! finalizer, so derived seeds do not depend on the platform or on crate
//! versions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator used everywhere randomness is consumed.
pub type Rng = ChaCha8Rng;

pub mod tag {
    pub const RUN: u64 = 0x5255_4e00;
    pub const INIT: u64 = 0x494e_4954;
    pub const GENERATION: u64 = 0x4745_4e00;
    pub const FITNESS: u64 = 0x4649_5400;
    pub const TEST: u64 = 0x5445_5354;
    pub const EPISODE: u64 = 0x4550_4900;
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fold `path` into `base`, one component at a time.
pub fn derive(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(base), |acc, &p| mix(acc ^ mix(p)))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for run `run_index` (1-based) of an experiment.
pub fn run_seed(base_seed: u64, run_index: usize) -> u64 {
    derive(base_seed, &[tag::RUN, run_index as u64])
}

/// Block of `n` episode seeds keyed by `seed`. Episode `i` always gets the
/// same seed regardless of `n`.
pub fn episode_seeds(seed: u64, n: usize) -> Vec<u64> {
    (0..n as u64).map(|i| derive(seed, &[tag::EPISODE, i])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_is_stable_and_path_sensitive() {
        assert_eq!(derive(7, &[1, 2]), derive(7, &[1, 2]));
        assert_ne!(derive(7, &[1, 2]), derive(7, &[2, 1]));
        assert_ne!(derive(7, &[1]), derive(8, &[1]));
        assert_ne!(run_seed(1, 1), run_seed(1, 2));
    }

    #[test]
    fn episode_block_prefix_is_stable() {
        let short = episode_seeds(42, 3);
        let long = episode_seeds(42, 10);
        assert_eq!(short[..], long[..3]);
    }
}
