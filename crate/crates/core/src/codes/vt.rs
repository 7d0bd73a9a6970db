//! Varshamov–Tenengolts single-deletion code.
//!
//! The syndrome of `x` (length q) is `sum_{i=1..q} i * x_i mod (q + 1)` with
//! 1-indexed positions. It is not restated by the protocol literature that uses
//! it, so the standard construction is taken as an external definition.

use super::DecodeError;
use crate::seq::BitSeq;

pub fn vt_syndrome(x: &BitSeq) -> u64 {
    let modulus = x.len() as u64 + 1;
    x.iter()
        .enumerate()
        .filter(|&(_, b)| b)
        .fold(0u64, |acc, (i, _)| (acc + i as u64 + 1) % modulus)
}

/// Bits needed to send a VT syndrome for length `q`: `ceil(log2(q + 1))`.
pub fn vt_syndrome_bits(q: usize) -> usize {
    let values = q as u64 + 1;
    (u64::BITS - (values - 1).leading_zeros()) as usize
}

/// Recover the length-`q` word with syndrome `syndrome` from `y`, which is that
/// word with at most one bit deleted. Linear time.
pub fn vt_decode(y: &BitSeq, syndrome: u64, q: usize) -> Result<BitSeq, DecodeError> {
    if syndrome > q as u64 {
        return Err(DecodeError::NoCodewordFound);
    }
    if y.len() == q {
        return if vt_syndrome(y) == syndrome { Ok(y.clone()) } else { Err(DecodeError::NoCodewordFound) };
    }
    if y.len() + 1 != q {
        return Err(DecodeError::NoCodewordFound);
    }

    let modulus = q as u64 + 1;
    let partial = y
        .iter()
        .enumerate()
        .filter(|&(_, b)| b)
        .fold(0u64, |acc, (i, _)| (acc + i as u64 + 1) % modulus);
    let deficiency = (syndrome + modulus - partial) % modulus;
    let weight = y.count_ones() as u64;

    let mut bits = y.as_slice().to_vec();
    if deficiency <= weight {
        // Insert a 0 with exactly `deficiency` ones to its right.
        let mut ones_right = 0u64;
        let mut pos = bits.len();
        while ones_right < deficiency {
            pos -= 1;
            if bits[pos] {
                ones_right += 1;
            }
        }
        bits.insert(pos, false);
    } else {
        // Insert a 1 with exactly `deficiency - weight - 1` zeros to its left.
        let want = deficiency - weight - 1;
        let mut zeros_left = 0u64;
        let mut pos = 0;
        while zeros_left < want {
            if !bits[pos] {
                zeros_left += 1;
            }
            pos += 1;
        }
        bits.insert(pos, true);
    }
    Ok(BitSeq::from_bits(bits))
}
