//! Deterministic per-trial random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer applied to `seed ⊕ stream`-derived input.
pub fn mix(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Roles keep the streams of one trial independent of each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Role {
    SymbolB = 1,
    SymbolD = 2,
    InputF = 3,
    InputG = 4,
    Weight = 5,
    Aux = 6,
}

/// Random stream for `(seed, depth, trial, role)`. The same tuple always
/// yields the same stream, whatever order trials are executed in.
pub fn trial_rng(seed: u64, depth: u32, trial: usize, role: Role) -> ChaCha8Rng {
    let key = mix(mix(seed, depth as u64), trial as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(role as u64);
    rng
}

/// Seed for per-trial derived objects such as cascade weights.
pub fn trial_seed(seed: u64, depth: u32, trial: usize, role: Role) -> u64 {
    mix(mix(mix(seed, depth as u64), trial as u64), role as u64)
}
