//! Module I: pivots, candidate matches, pivot selection and sections.
//!
//! Alice cuts X into segments of length L_S separated by pivots of length L_P
//! and sends every pivot. Bob finds each pivot's occurrences in Y, keeps the
//! largest set of occurrences consistent with a deletion-only channel, and
//! both sides cut their strings at the kept pivots.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::seq::BitSeq;

/// Smallest integer `L_P >= 3s + 8 + 2 log2(1/β)`.
pub fn pivot_length(s: f64, beta: f64) -> usize {
    let bound = 3.0 * s + 8.0 + 2.0 * (1.0 / beta).log2();
    (bound - 1e-9).ceil() as usize
}

/// Half-open span `[start, end)`.
pub type Span = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncoderLayout {
    pub n: usize,
    pub segment_len: usize,
    pub pivot_len: usize,
    /// Number of segments.
    pub k: usize,
    pub pivots: Vec<Span>,
    pub segments: Vec<Span>,
}

impl EncoderLayout {
    pub fn pivot_count(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_bits(&self, x: &BitSeq, i: usize) -> BitSeq {
        let (a, b) = self.pivots[i];
        x.slice(a..b)
    }

    /// A layout with no pivots: the whole file is one segment.
    pub fn single(n: usize, segment_len: usize, pivot_len: usize) -> Self {
        Self { n, segment_len, pivot_len, k: 1, pivots: Vec::new(), segments: vec![(0, n)] }
    }
}

/// Tile `[0, n)` as seg, piv, seg, ..., piv, seg with the last segment taking
/// the remainder.
pub fn partition_encoder(n: usize, segment_len: usize, pivot_len: usize) -> Result<EncoderLayout> {
    if pivot_len >= segment_len {
        return Err(Error::InvalidConfig(format!(
            "pivot length {pivot_len} must be shorter than segment length {segment_len}"
        )));
    }
    if n < segment_len {
        return Err(Error::InvalidConfig(format!("sequence length {n} is shorter than one segment ({segment_len})")));
    }
    let period = segment_len + pivot_len;
    let k = (n + pivot_len) / period;
    let mut pivots = Vec::with_capacity(k - 1);
    let mut segments = Vec::with_capacity(k);
    for i in 0..k {
        let start = i * period;
        if i + 1 < k {
            segments.push((start, start + segment_len));
            pivots.push((start + segment_len, start + period));
        } else {
            segments.push((start, n));
        }
    }
    Ok(EncoderLayout { n, segment_len, pivot_len, k, pivots, segments })
}

/// All `p <= x_start` with `y[p .. p + |pivot|) == pivot`.
pub fn find_candidates(y: &BitSeq, pivot: &BitSeq, x_start: usize) -> Vec<usize> {
    let len = pivot.len();
    if len > y.len() {
        return Vec::new();
    }
    let last = (y.len() - len).min(x_start);
    let (ys, ps) = (y.as_slice(), pivot.as_slice());
    (0..=last).filter(|&p| &ys[p..p + len] == ps).collect()
}

/// Occurrence index of every length-`len` window of Y, for pivots up to 64 bits.
pub struct CandidateIndex {
    len: usize,
    windows: HashMap<u64, Vec<usize>>,
}

impl CandidateIndex {
    pub fn build(y: &BitSeq, len: usize) -> Option<Self> {
        if len == 0 || len > 64 {
            return None;
        }
        let mut windows: HashMap<u64, Vec<usize>> = HashMap::new();
        if y.len() >= len {
            let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            let mut v = 0u64;
            for (i, b) in y.iter().enumerate() {
                v = ((v << 1) | b as u64) & mask;
                if i + 1 >= len {
                    windows.entry(v).or_default().push(i + 1 - len);
                }
            }
        }
        Some(Self { len, windows })
    }

    pub fn candidates(&self, pivot: &BitSeq, x_start: usize) -> Vec<usize> {
        assert_eq!(pivot.len(), self.len);
        match self.windows.get(&pivot.to_u64()) {
            Some(ps) => ps[..ps.partition_point(|&p| p <= x_start)].to_vec(),
            None => Vec::new(),
        }
    }
}

/// Candidate lists for every pivot of the layout.
pub fn all_candidates(x: &BitSeq, y: &BitSeq, layout: &EncoderLayout) -> Vec<Vec<usize>> {
    let index = CandidateIndex::build(y, layout.pivot_len);
    layout
        .pivots
        .iter()
        .enumerate()
        .map(|(i, &(start, _))| {
            let pivot = layout.pivot_bits(x, i);
            match &index {
                Some(ix) => ix.candidates(&pivot, start),
                None => find_candidates(y, &pivot, start),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PivotMatch {
    /// 0-based index into `EncoderLayout::pivots`.
    pub pivot_index: usize,
    pub y_start: usize,
    pub x_start: usize,
}

/// Whether `b` may follow `a` in a selection.
fn compatible(a: &PivotMatch, b: &PivotMatch, pivot_len: usize) -> bool {
    b.pivot_index > a.pivot_index
        && b.y_start >= a.y_start + pivot_len
        && b.y_start - a.y_start <= b.x_start - a.x_start
}

/// Whether `m` may be the last selected pivot: the Y tail cannot be longer
/// than the X tail.
fn can_end(m: &PivotMatch, n: usize, y_len: usize) -> bool {
    y_len >= m.y_start && y_len - m.y_start <= n - m.x_start
}

/// Maximum-cardinality chain of candidate matches.
///
/// A chain keeps pivot order, keeps matches in Y disjoint, never lets the Y
/// distance between consecutive matches exceed the X distance, and leaves a
/// Y tail no longer than the X tail. Among maximum chains the one whose
/// `(y_start, pivot_index)` sequence is lexicographically smallest wins.
pub fn select_pivots(candidates: &[Vec<usize>], layout: &EncoderLayout, y_len: usize) -> Vec<PivotMatch> {
    let mut nodes: Vec<PivotMatch> = candidates
        .iter()
        .enumerate()
        .flat_map(|(i, ps)| {
            let x_start = layout.pivots[i].0;
            ps.iter().filter(move |&&p| p <= x_start).map(move |&p| PivotMatch { pivot_index: i, y_start: p, x_start })
        })
        .collect();
    nodes.sort_by_key(|m| (m.y_start, m.pivot_index));
    let lp = layout.pivot_len;

    // best[u]: length of the longest valid chain starting at u (0 = none).
    let mut best = vec![0usize; nodes.len()];
    for u in (0..nodes.len()).rev() {
        let mut b = usize::from(can_end(&nodes[u], layout.n, y_len));
        // Successors have y >= y_u + lp, hence a larger sorted index.
        let from = nodes.partition_point(|m| m.y_start < nodes[u].y_start + lp);
        for v in from..nodes.len() {
            if best[v] > 0 && best[v] + 1 > b && compatible(&nodes[u], &nodes[v], lp) {
                b = best[v] + 1;
            }
        }
        best[u] = b;
    }

    let Some(&top) = best.iter().max() else { return Vec::new() };
    if top == 0 {
        return Vec::new();
    }
    // Nodes are sorted by (y, index), so the first qualifying node is the
    // lexicographically smallest continuation.
    let mut chain = Vec::with_capacity(top);
    let mut cur = (0..nodes.len()).find(|&u| best[u] == top).unwrap();
    chain.push(nodes[cur]);
    while best[cur] > 1 {
        let want = best[cur] - 1;
        let next = (cur + 1..nodes.len())
            .find(|&v| best[v] == want && compatible(&nodes[cur], &nodes[v], lp))
            .expect("dp guarantees a successor");
        chain.push(nodes[next]);
        cur = next;
    }
    chain
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionPair {
    pub section_id: u32,
    pub x_span: Span,
    pub y_span: Span,
}

impl SectionPair {
    pub fn x_len(&self) -> usize {
        self.x_span.1 - self.x_span.0
    }

    pub fn y_len(&self) -> usize {
        self.y_span.1 - self.y_span.0
    }

    /// `|x_span| - |y_span|`; negative only after a false pivot.
    pub fn deletions(&self) -> i64 {
        self.x_len() as i64 - self.y_len() as i64
    }

    /// False when Y is longer than X here, which deletions alone cannot cause.
    pub fn is_consistent(&self) -> bool {
        self.deletions() >= 0
    }
}

/// Cut both strings at the selected pivots. Unselected pivots stay inside the
/// X side of their section.
pub fn form_sections(selection: &[PivotMatch], layout: &EncoderLayout, y_len: usize) -> Vec<SectionPair> {
    let lp = layout.pivot_len;
    let mut sections = Vec::with_capacity(selection.len() + 1);
    let (mut x0, mut y0) = (0usize, 0usize);
    for m in selection {
        sections.push(SectionPair { section_id: sections.len() as u32, x_span: (x0, m.x_start), y_span: (y0, m.y_start) });
        x0 = m.x_start + lp;
        y0 = m.y_start + lp;
    }
    sections.push(SectionPair {
        section_id: sections.len() as u32,
        x_span: (x0, layout.n),
        y_span: (y0.min(y_len), y_len),
    });
    sections
}
