//! Seed derivation shared by the samplers.
//!
//! Every shot draws from its own ChaCha stream, so results do not depend on
//! the order in which shots are evaluated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for run `index` of a plan seeded with `seed`.
pub fn run_seed(seed: u64, index: usize) -> u64 {
    mix64(seed.wrapping_add((index as u64).wrapping_mul(GOLDEN)))
}

/// Tags a seed with a sub-domain. `tag == 0` returns the seed unchanged.
pub fn tagged(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_mul(GOLDEN)
}

/// Independent generator for shot `shot` under `seed`.
pub fn shot_rng(seed: u64, shot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot as u64);
    rng
}

/// The single uniform draw used to measure shot `shot`.
pub fn shot_uniform(seed: u64, shot: usize) -> f64 {
    shot_rng(seed, shot).gen::<f64>()
}
