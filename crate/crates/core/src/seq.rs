//! Immutable binary sequences.

use std::fmt;
use std::ops::{Index, Range};
use std::str::FromStr;

use crate::error::Error;

/// A finite binary sequence, index 0 leftmost.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitSeq {
    bits: Vec<bool>,
}

impl BitSeq {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn repeat(bit: bool, len: usize) -> Self {
        Self { bits: vec![bit; len] }
    }

    /// Build from the low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let bits = (0..len).rev().map(|i| (value >> i) & 1 == 1).collect();
        Self { bits }
    }

    /// Interpret as an unsigned integer, most significant bit first.
    pub fn to_u64(&self) -> u64 {
        assert!(self.bits.len() <= 64);
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    #[inline]
    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    /// Copy of bits `[range.start, range.end)`. Panics when out of bounds.
    pub fn slice(&self, range: Range<usize>) -> BitSeq {
        BitSeq { bits: self.bits[range].to_vec() }
    }

    pub fn concat(parts: &[&BitSeq]) -> BitSeq {
        let len = parts.iter().map(|p| p.len()).sum();
        let mut bits = Vec::with_capacity(len);
        for p in parts {
            bits.extend_from_slice(&p.bits);
        }
        BitSeq { bits }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Number of positions where the two sequences differ; the sequences must
    /// have equal length.
    pub fn hamming_distance(&self, other: &BitSeq) -> usize {
        assert_eq!(self.len(), other.len(), "hamming distance needs equal lengths");
        self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count()
    }

    /// Remove the bits at the given sorted, distinct positions.
    pub fn delete_positions(&self, positions: &[usize]) -> BitSeq {
        let mut out = Vec::with_capacity(self.len().saturating_sub(positions.len()));
        let mut next = positions.iter().peekable();
        for (i, &b) in self.bits.iter().enumerate() {
            if next.peek() == Some(&&i) {
                next.next();
            } else {
                out.push(b);
            }
        }
        BitSeq { bits: out }
    }

    /// True if `self` can be obtained from `other` by deleting bits.
    pub fn is_subsequence_of(&self, other: &BitSeq) -> bool {
        let mut it = other.bits.iter();
        self.bits.iter().all(|b| it.any(|o| o == b))
    }

    /// Truncate or zero-pad to exactly `len` bits.
    pub fn fit_to(&self, len: usize) -> BitSeq {
        let mut bits = self.bits.clone();
        bits.resize(len, false);
        BitSeq { bits }
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }
}

impl Index<usize> for BitSeq {
    type Output = bool;

    fn index(&self, i: usize) -> &bool {
        &self.bits[i]
    }
}

impl From<Vec<bool>> for BitSeq {
    fn from(bits: Vec<bool>) -> Self {
        Self { bits }
    }
}

impl From<&[bool]> for BitSeq {
    fn from(bits: &[bool]) -> Self {
        Self { bits: bits.to_vec() }
    }
}

impl FromIterator<bool> for BitSeq {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self { bits: iter.into_iter().collect() }
    }
}

impl FromStr for BitSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect()
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 128 {
            write!(f, "BitSeq({self})")
        } else {
            write!(f, "BitSeq(len={})", self.len())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BitSeq {
        s.parse().unwrap()
    }

    #[test]
    fn empty_is_valid() {
        let e = BitSeq::new();
        assert_eq!(e.len(), 0);
        assert_eq!(e.to_string(), "");
        assert_eq!(b(""), e);
    }

    #[test]
    fn slicing_lengths() {
        let x = b("1011001");
        for i in 0..=x.len() {
            for j in i..=x.len() {
                assert_eq!(x.slice(i..j).len(), j - i);
            }
        }
        assert_eq!(x.slice(2..5), b("110"));
    }

    #[test]
    fn u64_round_trip() {
        assert_eq!(BitSeq::from_u64(5, 4), b("0101"));
        assert_eq!(b("0101").to_u64(), 5);
    }

    #[test]
    fn deletion_and_subsequence() {
        let x = b("10110");
        let y = x.delete_positions(&[0, 3]);
        assert_eq!(y, b("010"));
        assert!(y.is_subsequence_of(&x));
        assert!(!b("000").is_subsequence_of(&x));
    }

    #[test]
    fn rejects_garbage() {
        assert!("10a1".parse::<BitSeq>().is_err());
    }

    #[test]
    fn fit_to_pads_and_truncates() {
        assert_eq!(b("101").fit_to(5), b("10100"));
        assert_eq!(b("101").fit_to(2), b("10"));
    }
}
