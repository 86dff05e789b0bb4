//! Randomness conventions shared by every sampler in the crate.
//!
//! Generator: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`, 0.9 series),
//! seeded with `SeedableRng::seed_from_u64`. A uniform draw takes the top 53
//! bits of one `next_u64` output: `(x >> 11) * 2^-53`, so draws lie in
//! `[0, 1)`.
//!
//! Trip `i` of a batch with master seed `s` uses the seed
//! `splitmix64(s + (i + 1) * 0x9E3779B97F4A7C15)`, i.e. the `(i + 1)`-th
//! output of a SplitMix64 stream started at `s`. This depends only on
//! `(s, i)`, so trips can be sampled in any order or on any thread.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Name and version of the generator, recorded in reports.
pub const GENERATOR: &str = "chacha8/rand_chacha-0.9/seed_from_u64;splitmix64-trip-seeds;v1";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trip `index` in a batch started from `master_seed`.
pub fn trip_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Derives an independent master seed for a named sub-stream.
pub fn stream_seed(master_seed: u64, stream: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(stream))
}

pub fn trip_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw in `[0, 1)` with 53 bits of precision.
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
