//! Seeded randomness with labeled sub-streams.
//!
//! Every consumer draws from its own stream derived from one root seed and a
//! label, so adding draws in one place never shifts another stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::seq::BitSeq;

pub type SimRng = ChaCha8Rng;

pub const LABEL_CHANNEL: &str = "channel";
pub const LABEL_SOURCE: &str = "source";
pub const LABEL_CODE_KEY: &str = "code-key";

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a over bytes.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    fnv1a_extend(FNV_OFFSET, bytes)
}

pub const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[inline]
pub fn fnv1a_extend(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Seed for the sub-stream `label` of `root`.
pub fn derive_seed(root: u64, label: &str) -> u64 {
    splitmix64(root ^ splitmix64(fnv1a(label.as_bytes())))
}

pub fn stream(root: u64, label: &str) -> SimRng {
    SimRng::seed_from_u64(derive_seed(root, label))
}

/// Uniform random bits.
pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, n: usize) -> BitSeq {
    (0..n).map(|_| rng.gen::<bool>()).collect()
}
