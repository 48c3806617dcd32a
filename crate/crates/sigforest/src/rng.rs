//! Seed derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator seeded by
//! hashing `(master_seed, role, index)` with fixed integer arithmetic, so
//! results are bit-identical across platforms and thread schedules.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; good avalanche, stable forever.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a over the role string.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derive a child seed from a master seed, a role name and an index.
pub fn derive_seed(master: u64, role: &str, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ fnv1a(role.as_bytes())) ^ splitmix64(index))
}

/// Seeded stream for a `(master, role, index)` triple.
pub fn stream(master: u64, role: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, role, index))
}
