//! Named, independent random streams derived from a master seed.
//!
//! Every consumer of randomness asks for the stream identified by
//! `(seed, label, generation, slot)`, so results never depend on the order
//! in which parallel work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Derives a 64-bit sub-seed; distinct inputs give unrelated outputs.
pub fn derive_seed(seed: u64, label: &str, generation: u64, slot: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ fnv1a(label));
    h = splitmix64(h ^ generation);
    splitmix64(h ^ slot)
}

pub fn stream(seed: u64, label: &str, generation: u64, slot: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, label, generation, slot))
}
