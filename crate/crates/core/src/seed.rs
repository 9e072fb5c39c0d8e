//! Counter-based seed derivation.
//!
//! A master seed expands into independent per-stage streams so each stage of
//! a run can be reproduced in isolation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of `(stream, index)` from `master`.
pub fn derive(master: u64, stream: u64, index: u64) -> u64 {
    mix64(mix64(master ^ mix64(stream)) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Named stages of a pipeline run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u64)]
pub enum Stream {
    Instance = 1,
    Tuning = 2,
    Sampling = 3,
    Eigensolver = 4,
    Annealing = 5,
    Baseline = 6,
}

impl Stream {
    pub fn seed(self, master: u64, index: u64) -> u64 {
        derive(master, self as u64, index)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
