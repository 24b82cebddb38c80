//! Seed handling. Every randomized operation in this crate takes an explicit
//! `u64` seed and owns its generator, so results are reproducible across runs
//! and across parallel schedules.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent child seed from a master seed and a stream index.
///
/// SplitMix64 finalizer; pure function of its inputs, so repetitions can be
/// scheduled in any order (or in parallel) without changing their streams.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw from [0, 1) built from the top 53 bits of the stream.
/// Avoids depending on any particular float-conversion strategy upstream.
pub fn uniform01(rng: &mut Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Uniform sign in {-1, +1}.
pub fn uniform_sign(rng: &mut Rng) -> i8 {
    if rng.next_u64() & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Bernoulli(p) draw.
pub fn bernoulli(rng: &mut Rng, p: f64) -> bool {
    uniform01(rng) < p
}

/// Uniform index in [0, n).
pub fn uniform_index(rng: &mut Rng, n: usize) -> usize {
    debug_assert!(n > 0);
    // Rejection-free shortcut is fine here: n is always tiny compared to 2^64.
    (rng.next_u64() % n as u64) as usize
}
