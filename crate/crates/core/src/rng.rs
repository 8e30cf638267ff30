//! Seedable counter-based random streams.
//!
//! A stream is identified by `(seed, index)`: ChaCha8 keyed by the seed and
//! positioned on stream `index`. Repetition `r` of an experiment, restart `r`
//! of a clustering run and resample `b` of a bootstrap each own a distinct
//! stream, so parallel execution reproduces the sequential results bit for
//! bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives an independent child seed, used when a component that owns its
/// own stream family (e.g. clustering restarts) runs inside another stream.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finaliser over the combined words
    let mut z = seed
        ^ index
            .wrapping_add(0x9E37_79B9_7F4A_7C15)
            .wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
