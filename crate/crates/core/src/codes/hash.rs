//! Keyed polynomial-hash syndromes and the brute-force decoder over
//! supersequences.
//!
//! A syndrome is the first `m` bits of `h_0(x) || h_1(x) || ...`, where each
//! lane `h_j(x) = sum_i x_i * r_j^i mod (2^61 - 1)` and `r_j` comes from the
//! shared key. Lanes are linear in the bits, so the decoder evaluates each
//! candidate supersequence of `y` in O(1) from prefix sums of `y`.

use crate::rng::splitmix64;
use crate::seq::BitSeq;

const P: u64 = (1 << 61) - 1;
pub(crate) const LANE_BITS: usize = 61;

#[inline]
fn mulmod(a: u64, b: u64) -> u64 {
    let z = a as u128 * b as u128;
    let lo = (z as u64) & P;
    let hi = (z >> 61) as u64;
    let s = lo + hi;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

/// Evaluation point of lane `j` under `key`.
pub(crate) fn lane_point(key: u64, j: usize) -> u64 {
    let mut state = key ^ (j as u64).wrapping_mul(0xA076_1D64_78BD_642F);
    loop {
        state = splitmix64(state);
        let r = state & P;
        if r > 1 && r < P {
            return r;
        }
    }
}

pub(crate) fn lane_value(x: &[bool], r: u64) -> u64 {
    // Horner from the right: sum x_i r^i.
    x.iter().rev().fold(0u64, |acc, &b| addmod(mulmod(acc, r), b as u64))
}

/// The `m`-bit truncated digest of `x` under `key`.
pub(crate) fn digest_bits(x: &[bool], key: u64, m: usize) -> BitSeq {
    let lanes = m.div_ceil(LANE_BITS);
    let mut out = Vec::with_capacity(m);
    for j in 0..lanes {
        let v = lane_value(x, lane_point(key, j));
        let take = (m - j * LANE_BITS).min(LANE_BITS);
        out.extend((0..take).map(|k| (v >> k) & 1 == 1));
    }
    BitSeq::from_bits(out)
}

/// Low bits of lane 0 encoded in `syndrome`, with their mask.
fn lane0_target(syndrome: &BitSeq) -> (u64, u64) {
    let take = syndrome.len().min(LANE_BITS);
    let mut v = 0u64;
    for k in 0..take {
        if syndrome[k] {
            v |= 1 << k;
        }
    }
    let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
    (v, mask)
}

/// Walks every distinct supersequence of `y` with `t` insertions exactly once.
///
/// Each supersequence is generated from its greedy (leftmost) embedding of `y`:
/// an inserted bit placed before `y[m]` must differ from `y[m]`, and bits after
/// the last embedded bit are free. That makes the walk a bijection onto the set
/// of supersequences.
struct Walker<'a> {
    y: &'a [bool],
    t: usize,
    pow: Vec<u64>,
    prefix: Vec<u64>,
    total: u64,
    inserts: Vec<(usize, bool)>,
}

impl<'a> Walker<'a> {
    fn new(y: &'a [bool], t: usize, r: u64) -> Self {
        let q = y.len() + t;
        let mut pow = Vec::with_capacity(q + 1);
        let mut p = 1u64;
        for _ in 0..=q {
            pow.push(p);
            p = mulmod(p, r);
        }
        let mut prefix = Vec::with_capacity(y.len() + 1);
        let mut acc = 0u64;
        prefix.push(0);
        for (i, &b) in y.iter().enumerate() {
            if b {
                acc = addmod(acc, pow[i]);
            }
            prefix.push(acc);
        }
        Self { y, t, pow, prefix, total: acc, inserts: Vec::with_capacity(t) }
    }

    fn materialize(&self) -> BitSeq {
        let mut out = Vec::with_capacity(self.y.len() + self.t);
        let mut m = 0;
        for &(at, bit) in &self.inserts {
            out.extend_from_slice(&self.y[m..at]);
            out.push(bit);
            m = at;
        }
        out.extend_from_slice(&self.y[m..]);
        BitSeq::from_bits(out)
    }

    /// Calls `visit(lane0_hash, self)` for each candidate.
    fn walk<F: FnMut(u64, &Self)>(&mut self, visit: &mut F) {
        if self.t == 0 {
            visit(self.total, self);
            return;
        }
        self.step(0, 0, 0, visit);
    }

    fn step<F: FnMut(u64, &Self)>(&mut self, m_start: usize, d: usize, acc: u64, visit: &mut F) {
        let ylen = self.y.len();
        let shift = self.pow[d];
        for m in m_start..=ylen {
            // y[m_start..m) lands at offset d.
            let base = addmod(acc, mulmod(shift, submod(self.prefix[m], self.prefix[m_start])));
            let choices: &[bool] = if m < ylen {
                if self.y[m] {
                    &[false]
                } else {
                    &[true]
                }
            } else {
                &[false, true]
            };
            for &bit in choices {
                let with_bit = if bit { addmod(base, self.pow[m + d]) } else { base };
                self.inserts.push((m, bit));
                if d + 1 == self.t {
                    let tail = mulmod(self.pow[self.t], submod(self.total, self.prefix[m]));
                    visit(addmod(with_bit, tail), self);
                } else {
                    self.step(m, d + 1, with_bit, visit);
                }
                self.inserts.pop();
            }
        }
    }
}

/// All distinct sequences of length `|y| + t` containing `y` as a subsequence.
pub fn supersequences(y: &BitSeq, t: usize) -> Vec<BitSeq> {
    let mut walker = Walker::new(y.as_slice(), t, 2);
    let mut out = Vec::new();
    walker.walk(&mut |_, w| out.push(w.materialize()));
    out
}

/// Supersequences of `y` with `t` insertions whose `syndrome.len()`-bit digest
/// equals `syndrome`. Stops after `limit` matches.
pub(crate) fn matching_supersequences(y: &BitSeq, t: usize, syndrome: &BitSeq, key: u64, limit: usize) -> Vec<BitSeq> {
    let m = syndrome.len();
    let (target, mask) = lane0_target(syndrome);
    let mut walker = Walker::new(y.as_slice(), t, lane_point(key, 0));
    let mut hits = Vec::new();
    walker.walk(&mut |h0, w| {
        if hits.len() >= limit || (h0 & mask) != target {
            return;
        }
        let cand = w.materialize();
        if m <= LANE_BITS || digest_bits(cand.as_slice(), key, m) == *syndrome {
            hits.push(cand);
        }
    });
    hits
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modular_helpers() {
        assert_eq!(mulmod(P - 1, P - 1), 1);
        assert_eq!(addmod(P - 1, 1), 0);
        assert_eq!(submod(0, 1), P - 1);
    }

    #[test]
    fn incremental_hash_matches_direct() {
        let y: BitSeq = "1101001110".parse().unwrap();
        let r = lane_point(42, 0);
        for t in 0..=3 {
            let mut walker = Walker::new(y.as_slice(), t, r);
            let mut n = 0;
            walker.walk(&mut |h, w| {
                let cand = w.materialize();
                assert_eq!(h, lane_value(cand.as_slice(), r), "candidate {cand}");
                n += 1;
            });
            assert!(n > 0);
        }
    }

    #[test]
    fn digest_lengths() {
        let x = vec![true; 100];
        for m in [0, 5, 56, 61, 62, 130] {
            assert_eq!(digest_bits(&x, 9, m).len(), m);
        }
        // The first lane's bits are a prefix of longer digests.
        let short = digest_bits(&x, 9, 40);
        let long = digest_bits(&x, 9, 100);
        assert_eq!(long.slice(0..40), short);
    }
}
