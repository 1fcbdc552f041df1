//! Named deterministic RNG streams.
//!
//! All randomness in the crate is derived from a single seed through
//! `(seed, label, index)` triples. The derivation is a fixed FNV-1a /
//! SplitMix64 mix, so streams are stable across runs, platforms and the
//! order in which components consume them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive a 64-bit sub-seed for `(seed, label, index)`.
pub fn derive(seed: u64, label: &str, index: u64) -> u64 {
    let mut x = splitmix(seed ^ fnv1a(label.as_bytes()));
    x = splitmix(x ^ index);
    x
}

/// Deterministic generator for the named sub-stream.
pub fn stream(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, label, index))
}
