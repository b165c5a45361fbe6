//! Counter-based seed derivation.
//!
//! Every random draw in the workspace is keyed by a `(seed, counter)` pair
//! through [`mix64`], so no RNG state is shared between samples, restarts or
//! trials and results do not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed: `splitmix64(seed ^ splitmix64(counter))`.
#[inline]
pub fn mix64(seed: u64, counter: u64) -> u64 {
    splitmix64(seed ^ splitmix64(counter))
}

/// A fresh generator for stream `counter` of `seed`.
pub fn rng_for(seed: u64, counter: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix64(seed, counter))
}
