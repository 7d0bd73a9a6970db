//! Module II: per-section divide-and-conquer deletion recovery.
//!
//! Bob reports how many deletions a section has. Parts with at most `w`
//! deletions are fixed with a code; larger parts are split at a delimiter
//! Alice sends from the middle of her part, and Bob answers with the deletion
//! state of both halves (or asks for another delimiter).

use serde::Serialize;
use thiserror::Error;

use crate::codes::{self, CodeSpec};
use crate::seq::BitSeq;
use crate::transcript::{Direction, Kind, Message, Module};

/// Parts deeper than this are sent verbatim.
pub const MAX_DEPTH: usize = 64;

/// Delimiter length `ceil(c * log2 n_s)`, at least 1.
pub fn delimiter_length(c: f64, n_s: usize) -> usize {
    if n_s <= 1 {
        return 1;
    }
    ((c * (n_s as f64).log2() - 1e-9).ceil() as usize).max(1)
}

/// Bits needed for one side's state: `ceil(log2(w + 2))`.
pub fn state_bits(w: usize) -> usize {
    let values = w as u64 + 2;
    (u64::BITS - (values - 1).leading_zeros()) as usize
}

/// Deletion state of one part as Bob reports it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PartState {
    Exact(usize),
    MoreThanW,
}

impl PartState {
    pub fn of(t: usize, w: usize) -> Self {
        if t <= w {
            PartState::Exact(t)
        } else {
            PartState::MoreThanW
        }
    }

    fn index(self, w: usize) -> u64 {
        match self {
            PartState::Exact(t) => t as u64,
            PartState::MoreThanW => w as u64 + 1,
        }
    }

    fn from_index(i: u64, w: usize) -> Option<Self> {
        match i {
            i if i <= w as u64 => Some(PartState::Exact(i as usize)),
            i if i == w as u64 + 1 => Some(PartState::MoreThanW),
            _ => None,
        }
    }
}

/// Bob's answer to a delimiter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseCode {
    Found { left: PartState, right: PartState },
    NotFound,
}

impl CaseCode {
    pub fn width(w: usize) -> usize {
        2 * state_bits(w)
    }

    /// `2 * ceil(log2(w + 2))` bits. `NotFound` takes the all-zero pattern,
    /// which a found delimiter never produces since a split part has at least
    /// one deletion.
    pub fn encode(self, w: usize) -> BitSeq {
        let sb = state_bits(w);
        let (l, r) = match self {
            CaseCode::Found { left, right } => (left.index(w), right.index(w)),
            CaseCode::NotFound => (0, 0),
        };
        BitSeq::from_u64((l << sb) | r, 2 * sb)
    }

    pub fn decode(bits: &BitSeq, w: usize) -> Option<Self> {
        let sb = state_bits(w);
        if bits.len() != 2 * sb {
            return None;
        }
        let v = bits.to_u64();
        let (l, r) = (v >> sb, v & ((1 << sb) - 1));
        if l == 0 && r == 0 {
            return Some(CaseCode::NotFound);
        }
        Some(CaseCode::Found { left: PartState::from_index(l, w)?, right: PartState::from_index(r, w)? })
    }
}

/// Bob's first report for a section: `ceil(log2(w + 2))` bits.
pub fn report_section_case(t: usize, w: usize) -> BitSeq {
    BitSeq::from_u64(PartState::of(t, w).index(w), state_bits(w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DelimiterError {
    #[error("no delimiter placement left")]
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delimiter {
    pub bits: BitSeq,
    pub start: usize,
    /// End offset of the delimiter within the part; the cut point.
    pub x_split: usize,
}

/// Start offsets of successive delimiter attempts in a part of length `len`:
/// the centred window, then alternately `l` further right and left, each side
/// clipped once at the part boundary.
pub fn delimiter_starts(len: usize, l: usize) -> Vec<usize> {
    if l == 0 || len < l {
        return Vec::new();
    }
    let last = len - l;
    let base = (len / 2).saturating_sub(l / 2).min(last);
    let mut right = Vec::new();
    let mut at = base;
    while at < last {
        at = (at + l).min(last);
        right.push(at);
    }
    let mut left = Vec::new();
    let mut at = base;
    while at > 0 {
        at = at.saturating_sub(l);
        left.push(at);
    }
    let mut out = vec![base];
    let (mut r, mut lft) = (right.into_iter(), left.into_iter());
    loop {
        match (r.next(), lft.next()) {
            (None, None) => break,
            (a, b) => out.extend(a.into_iter().chain(b)),
        }
    }
    out
}

pub fn delimiter_for(x_part: &BitSeq, attempt: usize, l: usize) -> Result<Delimiter, DelimiterError> {
    let start = *delimiter_starts(x_part.len(), l).get(attempt).ok_or(DelimiterError::Exhausted)?;
    Ok(Delimiter { bits: x_part.slice(start..start + l), start, x_split: start + l })
}

/// Leftmost occurrence `p` of `delim` in `y_part` whose end lands in
/// `[x_split - max_shift, x_split]`: the delimiter can only move left, and by
/// no more than the part's deletion count.
pub fn locate_delimiter(y_part: &BitSeq, delim: &BitSeq, x_split: usize, max_shift: usize) -> Option<usize> {
    let l = delim.len();
    if l == 0 || y_part.len() < l || x_split < l {
        return None;
    }
    let hi = (x_split - l).min(y_part.len() - l);
    let lo = x_split.saturating_sub(max_shift).saturating_sub(l);
    if lo > hi {
        return None;
    }
    let (ys, ds) = (y_part.as_slice(), delim.as_slice());
    (lo..=hi).find(|&p| &ys[p..p + l] == ds)
}

/// One section to recover.
#[derive(Debug, Clone)]
pub struct RecoveryTask<'a> {
    pub section_id: u32,
    pub x: &'a BitSeq,
    pub y: &'a BitSeq,
    /// Delimiter length, fixed for the whole section.
    pub l: usize,
}

impl<'a> RecoveryTask<'a> {
    pub fn new(section_id: u32, x: &'a BitSeq, y: &'a BitSeq, c: f64) -> Self {
        Self { section_id, x, y, l: delimiter_length(c, x.len()) }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SectionStats {
    pub delimiters_sent: usize,
    pub delimiters_not_found: usize,
    pub code_invocations: usize,
    pub verbatim_parts: usize,
    pub decode_failures: usize,
    /// Y longer than X: no recovery possible, output is Y fitted to length.
    pub inconsistent: bool,
}

#[derive(Debug, Clone)]
pub struct SectionOutcome {
    pub section_id: u32,
    /// Bob's estimate of the X section; always `|x|` long.
    pub output: BitSeq,
    pub messages: Vec<Message>,
    /// Rounds on the critical path when halves proceed in parallel.
    pub rounds: usize,
    pub stats: SectionStats,
}

impl SectionOutcome {
    pub fn bits(&self) -> u64 {
        self.messages.iter().map(|m| m.bits).sum()
    }

    pub fn bits_of(&self, kind: Kind) -> u64 {
        self.messages.iter().filter(|m| m.kind == kind).map(|m| m.bits).sum()
    }

    pub fn bits_from(&self, dir: Direction) -> u64 {
        self.messages.iter().filter(|m| m.direction == dir).map(|m| m.bits).sum()
    }
}

struct Session<'a> {
    id: u32,
    codes: &'a CodeSpec,
    l: usize,
    messages: Vec<Message>,
    stats: SectionStats,
}

impl Session<'_> {
    fn send(&mut self, dir: Direction, kind: Kind, payload: &BitSeq) {
        self.messages.push(Message::with_payload(dir, Module::Recovery, kind, payload).in_section(self.id));
    }

    /// Recover one part whose deletion count both sides know. Returns Bob's
    /// output and the rounds used.
    fn part(&mut self, x: &BitSeq, y: &BitSeq, depth: usize) -> (BitSeq, usize) {
        let t = x.len() - y.len();
        let w = self.codes.w();
        if t == 0 {
            return (y.clone(), 0);
        }
        if t <= w {
            let syndrome = codes::encode(x, t, self.codes);
            self.send(Direction::AliceToBob, Kind::Syndrome, &syndrome.to_bits());
            self.stats.code_invocations += 1;
            let out = match codes::multi_decode(y, t, &syndrome, x.len(), self.codes) {
                Ok(z) => z,
                Err(_) => {
                    self.stats.decode_failures += 1;
                    y.fit_to(x.len())
                }
            };
            return (out, 1);
        }
        if x.len() < 2 * self.l || depth >= MAX_DEPTH {
            return self.verbatim(x);
        }

        let mut rounds = 0;
        for attempt in 0.. {
            let Ok(delim) = delimiter_for(x, attempt, self.l) else {
                let (out, r) = self.verbatim(x);
                return (out, rounds + r);
            };
            if delim.x_split == x.len() {
                // Cutting at the very end leaves the part unchanged.
                continue;
            }
            self.send(Direction::AliceToBob, Kind::Delimiter, &delim.bits);
            self.stats.delimiters_sent += 1;
            rounds += 2;
            match locate_delimiter(y, &delim.bits, delim.x_split, t) {
                None => {
                    self.stats.delimiters_not_found += 1;
                    self.send(Direction::BobToAlice, Kind::CaseCode, &CaseCode::NotFound.encode(w));
                }
                Some(p) => {
                    let y_split = p + self.l;
                    let t_left = delim.x_split - y_split;
                    let t_right = t - t_left;
                    let code = CaseCode::Found { left: PartState::of(t_left, w), right: PartState::of(t_right, w) };
                    self.send(Direction::BobToAlice, Kind::CaseCode, &code.encode(w));
                    let (xl, xr) = (x.slice(0..delim.x_split), x.slice(delim.x_split..x.len()));
                    let (yl, yr) = (y.slice(0..y_split), y.slice(y_split..y.len()));
                    let (ol, rl) = self.part(&xl, &yl, depth + 1);
                    let (or, rr) = self.part(&xr, &yr, depth + 1);
                    return (BitSeq::concat(&[&ol, &or]), rounds + rl.max(rr));
                }
            }
        }
        unreachable!("attempt loop only exits by return")
    }

    fn verbatim(&mut self, x: &BitSeq) -> (BitSeq, usize) {
        self.send(Direction::AliceToBob, Kind::Verbatim, x);
        self.stats.verbatim_parts += 1;
        (x.clone(), 1)
    }
}

/// Run Module II on one section.
pub fn recover_section(task: &RecoveryTask<'_>, codes: &CodeSpec) -> SectionOutcome {
    let w = codes.w();
    let mut session = Session { id: task.section_id, codes, l: task.l, messages: Vec::new(), stats: SectionStats::default() };
    let (x, y) = (task.x, task.y);

    let (output, rounds) = if y.len() > x.len() {
        // Only a false pivot makes Y longer; report "no deletions" and let
        // Module III repair the section.
        session.stats.inconsistent = true;
        session.send(Direction::BobToAlice, Kind::SectionCase, &report_section_case(0, w));
        (y.fit_to(x.len()), 1)
    } else {
        let t = x.len() - y.len();
        session.send(Direction::BobToAlice, Kind::SectionCase, &report_section_case(t, w));
        let (out, r) = session.part(x, y, 0);
        (out, 1 + r)
    };
    debug_assert_eq!(output.len(), x.len());
    SectionOutcome { section_id: task.section_id, output, messages: session.messages, rounds, stats: session.stats }
}
