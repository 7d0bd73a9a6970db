//! Full sessions: matching, recovery, then error correction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelOutcome;
use crate::error::{Error, Result};
use crate::matching::{self, EncoderLayout, PivotMatch, SectionPair};
use crate::params::{EcPolicy, ProtocolParams};
use crate::recovery::{self, RecoveryTask, SectionOutcome};
use crate::seq::BitSeq;
use crate::transcript::{payload_hash, Direction, Kind, Message, Module, Transcript};

/// Bits of the verification digest charged by the empirical policy.
pub const VERIFY_BITS: u64 = 64;

/// `H(p) = p log2(1/p) + (1-p) log2(1/(1-p))`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
    if p == 0.0 || p == 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn capacity_bits(n: usize, p: f64) -> u64 {
    (n as f64 * binary_entropy(p) - 1e-9).ceil().max(0.0) as u64
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(rename = "bits_I")]
    pub bits_i: u64,
    #[serde(rename = "bits_II")]
    pub bits_ii: u64,
    #[serde(rename = "bits_III")]
    pub bits_iii: u64,
    pub bits_total: u64,
    pub rounds_sequential: u64,
    pub rounds_parallel: u64,
    pub selected_pivots: u64,
    /// Selected matches that do not sit at the pivot's true image in Y. Without
    /// channel ground truth, matches whose cut breaks the deletion-only
    /// relation between the two prefixes or suffixes.
    pub false_pivots: u64,
    /// Hamming distance between X and Bob's estimate before Module III.
    pub residual_errors: u64,
    pub synchronized: bool,
    /// Wall-clock time; filled by callers that time the session, else 0.
    pub runtime_ms: u64,
}

impl Metrics {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("metrics serialize")
    }
}

/// Diagnostics that do not belong in the metrics record.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SessionDetail {
    pub layout_k: usize,
    pub sections: usize,
    pub inconsistent_sections: usize,
    pub delimiters_sent: usize,
    pub delimiters_not_found: usize,
    pub code_invocations: usize,
    pub verbatim_parts: usize,
    pub decode_failures: usize,
    /// Sum of per-section `|x| - |y|`.
    pub section_deletions: i64,
}

#[derive(Debug, Clone)]
pub struct SyncOutput {
    pub x_hat: BitSeq,
    /// Bob's estimate after Modules I and II.
    pub x_partial: BitSeq,
    pub metrics: Metrics,
    pub transcript: Transcript,
    pub layout: EncoderLayout,
    pub selection: Vec<PivotMatch>,
    pub sections: Vec<SectionPair>,
    pub detail: SessionDetail,
}

#[derive(Debug, Clone)]
pub struct EcOutcome {
    pub bits: u64,
    pub residual_errors: u64,
    pub x_hat: BitSeq,
    pub messages: Vec<Message>,
}

/// Charge Module III for turning `x_partial` into `x`.
///
/// Correction is modeled as succeeding once the capacity cost is paid.
pub fn error_correction_bits(x: &BitSeq, x_partial: &BitSeq, params: &ProtocolParams) -> EcOutcome {
    assert_eq!(x.len(), x_partial.len(), "estimate must have the file's length");
    let n = x.len();
    let e = x.hamming_distance(x_partial) as u64;
    let mut messages = Vec::new();
    let tag = payload_hash(x);
    match params.ec_policy {
        EcPolicy::Empirical => {
            messages.push(Message::charged(Direction::AliceToBob, Module::ErrorCorrection, Kind::Verify, VERIFY_BITS, tag));
            if e > 0 {
                let bits = capacity_bits(n, e as f64 / n as f64);
                messages.push(Message::charged(Direction::AliceToBob, Module::ErrorCorrection, Kind::ECBits, bits, tag ^ e));
            }
        }
        EcPolicy::Theoretical => {
            let bits = capacity_bits(n, (2.0 * params.beta).min(0.5));
            messages.push(Message::charged(Direction::AliceToBob, Module::ErrorCorrection, Kind::ECBits, bits, tag));
        }
    }
    EcOutcome { bits: messages.iter().map(|m| m.bits).sum(), residual_errors: e, x_hat: x.clone(), messages }
}

/// Whether a selected match sits where the pivot really landed: its start is
/// the image of the pivot's first bit, or its end the image of the pivot's end.
pub fn is_true_match(m: &PivotMatch, pivot_len: usize, truth: &ChannelOutcome) -> bool {
    m.y_start == truth.image(m.x_start) || m.y_start + pivot_len == truth.image(m.x_start + pivot_len)
}

/// Whether cutting at `m` keeps both prefixes and both suffixes in a
/// deletion-only relation.
pub fn is_consistent_match(m: &PivotMatch, pivot_len: usize, x: &BitSeq, y: &BitSeq) -> bool {
    let yp = &y.as_slice()[..m.y_start];
    let xp = &x.as_slice()[..m.x_start];
    let ys = &y.as_slice()[m.y_start + pivot_len..];
    let xs = &x.as_slice()[m.x_start + pivot_len..];
    is_subseq(yp, xp) && is_subseq(ys, xs)
}

fn is_subseq(a: &[bool], b: &[bool]) -> bool {
    let mut it = b.iter();
    a.len() <= b.len() && a.iter().all(|v| it.any(|o| o == v))
}

/// Synchronize Bob's `y` to Alice's `x`.
pub fn synchronize(x: &BitSeq, y: &BitSeq, params: &ProtocolParams) -> Result<SyncOutput> {
    run(x, y, params, None)
}

/// As [`synchronize`], classifying false pivots against the channel's ground truth.
pub fn synchronize_with_truth(x: &BitSeq, channel: &ChannelOutcome, params: &ProtocolParams) -> Result<SyncOutput> {
    run(x, &channel.y, params, Some(channel))
}

fn run(x: &BitSeq, y: &BitSeq, params: &ProtocolParams, truth: Option<&ChannelOutcome>) -> Result<SyncOutput> {
    params.validate()?;
    if x.len() != params.n {
        return Err(Error::InvalidConfig(format!("params.n = {} but |x| = {}", params.n, x.len())));
    }
    if y.len() > x.len() {
        return Err(Error::InvalidConfig(format!("|y| = {} exceeds |x| = {}", y.len(), x.len())));
    }
    let codes = params.code_spec();
    let (ls, lp) = (params.segment_len(), params.pivot_len());
    let mut transcript = Transcript::new();

    // Module I.
    let layout = if x.len() < ls {
        EncoderLayout::single(x.len(), ls, lp)
    } else {
        matching::partition_encoder(x.len(), ls, lp)?
    };
    let selection = if layout.pivots.is_empty() {
        Vec::new()
    } else {
        let pivots: Vec<BitSeq> = (0..layout.pivot_count()).map(|i| layout.pivot_bits(x, i)).collect();
        let refs: Vec<&BitSeq> = pivots.iter().collect();
        transcript.record(Message::with_payload(Direction::AliceToBob, Module::Matching, Kind::Pivots, &BitSeq::concat(&refs)));
        let candidates = matching::all_candidates(x, y, &layout);
        let selection = matching::select_pivots(&candidates, &layout, y.len());
        let mut flags = vec![false; layout.pivot_count()];
        for m in &selection {
            flags[m.pivot_index] = true;
        }
        transcript.record(Message::with_payload(
            Direction::BobToAlice,
            Module::Matching,
            Kind::PivotFeedback,
            &BitSeq::from_bits(flags),
        ));
        selection
    };
    let rounds_i = if layout.pivots.is_empty() { 0 } else { 2 };
    let sections = matching::form_sections(&selection, &layout, y.len());

    // Module II, sections in parallel, merged in section order.
    let outcomes: Vec<SectionOutcome> = sections
        .par_iter()
        .map(|s| {
            let xs = x.slice(s.x_span.0..s.x_span.1);
            let ys = y.slice(s.y_span.0..s.y_span.1);
            recovery::recover_section(&RecoveryTask::new(s.section_id, &xs, &ys, params.c), &codes)
        })
        .collect();

    let mut detail = SessionDetail { layout_k: layout.k, sections: sections.len(), ..Default::default() };
    let mut partial = Vec::with_capacity(x.len());
    let (mut rounds_ii_seq, mut rounds_ii_par) = (0u64, 0u64);
    for (i, out) in outcomes.into_iter().enumerate() {
        partial.extend_from_slice(out.output.as_slice());
        if let Some(m) = selection.get(i) {
            // Bob holds every pivot string Alice sent.
            partial.extend_from_slice(&x.as_slice()[m.x_start..m.x_start + lp]);
        }
        rounds_ii_seq += out.rounds as u64;
        rounds_ii_par = rounds_ii_par.max(out.rounds as u64);
        let st = &out.stats;
        detail.inconsistent_sections += st.inconsistent as usize;
        detail.delimiters_sent += st.delimiters_sent;
        detail.delimiters_not_found += st.delimiters_not_found;
        detail.code_invocations += st.code_invocations;
        detail.verbatim_parts += st.verbatim_parts;
        detail.decode_failures += st.decode_failures;
        transcript.extend(out.messages);
    }
    detail.section_deletions = sections.iter().map(SectionPair::deletions).sum();
    let x_partial = BitSeq::from_bits(partial);

    // Module III.
    let ec = error_correction_bits(x, &x_partial, params);
    transcript.extend(ec.messages);

    let false_pivots = selection
        .iter()
        .filter(|m| match truth {
            Some(t) => !is_true_match(m, lp, t),
            None => !is_consistent_match(m, lp, x, y),
        })
        .count() as u64;

    let (bits_i, bits_ii, bits_iii) = (
        transcript.total(Module::Matching),
        transcript.total(Module::Recovery),
        transcript.total(Module::ErrorCorrection),
    );
    let metrics = Metrics {
        bits_i,
        bits_ii,
        bits_iii,
        bits_total: bits_i + bits_ii + bits_iii,
        rounds_sequential: rounds_i + rounds_ii_seq + 1,
        rounds_parallel: rounds_i + rounds_ii_par + 1,
        selected_pivots: selection.len() as u64,
        false_pivots,
        residual_errors: ec.residual_errors,
        synchronized: ec.x_hat == *x,
        runtime_ms: 0,
    };
    Ok(SyncOutput { x_hat: ec.x_hat, x_partial, metrics, transcript, layout, selection, sections, detail })
}
