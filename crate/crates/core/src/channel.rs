//! i.i.d. deletion channel.

use rand::Rng;

use crate::seq::BitSeq;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelOutcome {
    pub y: BitSeq,
    /// Sorted 0-based indices into the channel input.
    pub deleted_positions: Vec<usize>,
}

impl ChannelOutcome {
    pub fn deletions(&self) -> usize {
        self.deleted_positions.len()
    }

    /// Number of deleted positions strictly before `i`.
    pub fn deleted_before(&self, i: usize) -> usize {
        self.deleted_positions.partition_point(|&p| p < i)
    }

    /// Position in the output of the first surviving input bit at or after `i`
    /// (or `|y|` when none survives).
    pub fn image(&self, i: usize) -> usize {
        i - self.deleted_before(i)
    }
}

/// Delete every bit of `x` independently with probability `beta`.
pub fn apply_deletion_channel<R: Rng + ?Sized>(x: &BitSeq, beta: f64, rng: &mut R) -> ChannelOutcome {
    assert!((0.0..=1.0).contains(&beta), "deletion rate must lie in [0, 1]");
    let mut deleted_positions = Vec::new();
    let mut kept = Vec::with_capacity(x.len());
    for (i, b) in x.iter().enumerate() {
        // gen::<f64>() is in [0, 1): beta = 0 never deletes, beta = 1 always does.
        if rng.gen::<f64>() < beta {
            deleted_positions.push(i);
        } else {
            kept.push(b);
        }
    }
    ChannelOutcome { y: BitSeq::from_bits(kept), deleted_positions }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn zero_rate_is_identity() {
        let x: BitSeq = "10110".parse().unwrap();
        let out = apply_deletion_channel(&x, 0.0, &mut rng::stream(1, rng::LABEL_CHANNEL));
        assert_eq!(out.y, x);
        assert!(out.deleted_positions.is_empty());
    }

    #[test]
    fn full_rate_deletes_everything() {
        let x: BitSeq = "10110".parse().unwrap();
        let out = apply_deletion_channel(&x, 1.0, &mut rng::stream(1, rng::LABEL_CHANNEL));
        assert!(out.y.is_empty());
        assert_eq!(out.deleted_positions, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn exhaustive_small_inputs() {
        for len in 0..=10usize {
            for v in 0..(1u64 << len) {
                let x = BitSeq::from_u64(v, len);
                for (k, &beta) in [0.0, 0.3, 1.0].iter().enumerate() {
                    let mut r = rng::stream(v ^ ((k as u64) << 40) ^ ((len as u64) << 50), rng::LABEL_CHANNEL);
                    let out = apply_deletion_channel(&x, beta, &mut r);
                    assert_eq!(out.y.len(), x.len() - out.deleted_positions.len());
                    assert!(out.deleted_positions.windows(2).all(|w| w[0] < w[1]));
                    assert_eq!(x.delete_positions(&out.deleted_positions), out.y);
                }
            }
        }
    }

    #[test]
    fn image_accounts_for_deletions() {
        let out = ChannelOutcome { y: "101".parse().unwrap(), deleted_positions: vec![1, 3] };
        assert_eq!(out.image(0), 0);
        assert_eq!(out.image(1), 1);
        assert_eq!(out.image(2), 1);
        assert_eq!(out.image(4), 2);
        assert_eq!(out.image(5), 3);
    }
}
