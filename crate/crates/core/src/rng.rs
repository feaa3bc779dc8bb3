//! Deterministic seed derivation.
//!
//! Every random decision in the crate draws from a ChaCha stream whose seed is
//! derived from a master seed plus a path of stream tags and indices. Work
//! units (classes, samples, epochs, grid points) each get their own derived
//! stream, so they can be computed in any order — or in parallel — without
//! changing results.
//!
//! The derivation absorbs each path element into a 64-bit state with the
//! SplitMix64 finalizer, the same mixer used by `SeedableRng::seed_from_u64`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags namespacing the derivation paths used across the crate.
pub mod stream {
    pub const IFS_SYSTEM: u64 = 1;
    pub const IFS_SAMPLE: u64 = 2;
    pub const IFS_NOISE: u64 = 3;
    pub const IFS_RESAMPLE: u64 = 4;
    pub const TRAIN_INIT: u64 = 5;
    pub const TRAIN_EPOCH: u64 = 6;
    pub const SPLIT: u64 = 7;
    pub const FIT: u64 = 8;
    pub const EXTRACT: u64 = 9;
}

#[inline]
fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and a path of tag/index words.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut state = splitmix(master);
    for &word in path {
        state = splitmix(state ^ splitmix(word));
    }
    state
}

/// A ChaCha stream for the given derivation path.
pub fn stream_rng(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}

/// FNV-1a over a byte slice; used for stable content fingerprints and
/// label-keyed stream derivation.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100_0000_01b3);
    }
    hash
}
