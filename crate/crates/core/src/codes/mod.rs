//! Deletion-correcting codes used by section recovery.
//!
//! Single deletions use the VT code. For `2 <= t <= w` deletions a keyed
//! digest of `ceil(t * a_t * log2 q)` bits stands in for an algebraic
//! multi-deletion code of the same redundancy; the decoder searches all
//! supersequences of the received word for the unique digest match.

mod hash;
mod vt;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::seq::BitSeq;

pub use vt::{vt_decode, vt_syndrome, vt_syndrome_bits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("no codeword matches the syndrome")]
    NoCodewordFound,
    #[error("{0} candidates match the syndrome")]
    AmbiguousDecode(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    /// Efficiencies a_1..a_w; `w = a.len()`.
    pub a: Vec<f64>,
    /// Digest key shared by both parties. Never transmitted.
    pub key: u64,
    /// Use the VT code (a_1 = 1 in effect) for single deletions.
    pub vt_single: bool,
}

impl CodeSpec {
    pub fn new(a: Vec<f64>, key: u64) -> Self {
        assert!(!a.is_empty(), "a code spec needs at least one efficiency");
        assert!(a.iter().all(|&v| v >= 1.0), "efficiencies must be >= 1");
        Self { a, key, vt_single: true }
    }

    /// VT for one deletion plus a 7 log q code for two.
    pub fn two_deletion(key: u64) -> Self {
        Self::new(vec![1.0, 3.5], key)
    }

    pub fn w(&self) -> usize {
        self.a.len()
    }

    pub fn a_max(&self) -> f64 {
        self.a.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `ceil(t * a_t * log2 q)` bits.
    pub fn redundancy_bits(&self, t: usize, q: usize) -> usize {
        assert!(t >= 1 && t <= self.w(), "deletion count {t} outside 1..={}", self.w());
        if q <= 1 {
            return 0;
        }
        let exact = t as f64 * self.a[t - 1] * (q as f64).log2();
        // Absorb float noise on exact integers such as 2 * 3.5 * 8.
        (exact - 1e-9).ceil().max(0.0) as usize
    }

    /// Bits actually sent to correct `t` deletions in a length-`q` word.
    pub fn transmitted_bits(&self, t: usize, q: usize) -> usize {
        match t {
            0 => 0,
            1 if self.vt_single => vt_syndrome_bits(q),
            _ => self.redundancy_bits(t, q),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Syndrome {
    Vt { value: u64, q: usize },
    Hash { bits: BitSeq, q: usize, t: usize },
}

impl Syndrome {
    /// Wire form.
    pub fn to_bits(&self) -> BitSeq {
        match self {
            Syndrome::Vt { value, q } => BitSeq::from_u64(*value, vt_syndrome_bits(*q)),
            Syndrome::Hash { bits, .. } => bits.clone(),
        }
    }

    pub fn len_bits(&self) -> usize {
        match self {
            Syndrome::Vt { q, .. } => vt_syndrome_bits(*q),
            Syndrome::Hash { bits, .. } => bits.len(),
        }
    }
}

/// Digest syndrome of exactly `spec.redundancy_bits(t, |x|)` bits.
pub fn hash_syndrome(x: &BitSeq, t: usize, spec: &CodeSpec) -> BitSeq {
    hash::digest_bits(x.as_slice(), spec.key, spec.redundancy_bits(t, x.len()))
}

/// Syndrome Alice sends so Bob can undo `t` deletions of `x`.
pub fn encode(x: &BitSeq, t: usize, spec: &CodeSpec) -> Syndrome {
    if t == 0 {
        Syndrome::Hash { bits: BitSeq::new(), q: x.len(), t }
    } else if t == 1 && spec.vt_single {
        Syndrome::Vt { value: vt_syndrome(x), q: x.len() }
    } else {
        Syndrome::Hash { bits: hash_syndrome(x, t, spec), q: x.len(), t }
    }
}

/// Every distinct binary sequence of length `|y| + t` that has `y` as a subsequence.
pub fn enumerate_supersequences(y: &BitSeq, t: usize) -> BTreeSet<BitSeq> {
    hash::supersequences(y, t).into_iter().collect()
}

/// Decode `y` (a length-`q` word with `t` deletions) against `syndrome`.
pub fn multi_decode(y: &BitSeq, t: usize, syndrome: &Syndrome, q: usize, spec: &CodeSpec) -> Result<BitSeq, DecodeError> {
    if y.len() + t != q {
        return Err(DecodeError::NoCodewordFound);
    }
    if t == 0 {
        return Ok(y.clone());
    }
    match syndrome {
        Syndrome::Vt { value, q: sq } => {
            if *sq != q || t != 1 {
                return Err(DecodeError::NoCodewordFound);
            }
            vt_decode(y, *value, q)
        }
        Syndrome::Hash { bits, .. } => {
            let mut hits = hash::matching_supersequences(y, t, bits, spec.key, 2);
            match hits.len() {
                0 => Err(DecodeError::NoCodewordFound),
                1 => Ok(hits.pop().unwrap()),
                _ => {
                    // Count them all for the report.
                    let n = hash::matching_supersequences(y, t, bits, spec.key, usize::MAX).len();
                    Err(DecodeError::AmbiguousDecode(n))
                }
            }
        }
    }
}
