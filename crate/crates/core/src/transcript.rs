//! Ordered log of every protocol message and the bit accounting built on it.

use std::fmt;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{fnv1a_extend, FNV_OFFSET};
use crate::seq::BitSeq;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "A2B")]
    AliceToBob,
    #[serde(rename = "B2A")]
    BobToAlice,
}

/// Protocol module a message belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Module {
    #[serde(rename = "I")]
    Matching,
    #[serde(rename = "II")]
    Recovery,
    #[serde(rename = "III")]
    ErrorCorrection,
}

impl Module {
    fn index(self) -> usize {
        match self {
            Module::Matching => 0,
            Module::Recovery => 1,
            Module::ErrorCorrection => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    Pivots,
    PivotFeedback,
    SectionCase,
    Delimiter,
    CaseCode,
    Syndrome,
    /// A part sent raw when divide-and-conquer cannot continue.
    Verbatim,
    ECBits,
    Verify,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A message before it is placed in a transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub direction: Direction,
    pub module: Module,
    pub kind: Kind,
    pub bits: u64,
    pub section_id: Option<u32>,
    /// Digest of the payload content (not chained).
    pub payload_hash: u64,
}

impl Message {
    /// A message whose bit count is the payload length.
    pub fn with_payload(direction: Direction, module: Module, kind: Kind, payload: &BitSeq) -> Self {
        Self {
            direction,
            module,
            kind,
            bits: payload.len() as u64,
            section_id: None,
            payload_hash: payload_hash(payload),
        }
    }

    /// A message charged `bits` without a concrete payload.
    pub fn charged(direction: Direction, module: Module, kind: Kind, bits: u64, tag: u64) -> Self {
        Self { direction, module, kind, bits, section_id: None, payload_hash: tag }
    }

    pub fn in_section(mut self, id: u32) -> Self {
        self.section_id = Some(id);
        self
    }
}

pub fn payload_hash(payload: &BitSeq) -> u64 {
    let mut h = fnv1a_extend(FNV_OFFSET, &(payload.len() as u64).to_le_bytes());
    for chunk in payload.as_slice().chunks(8) {
        let byte = chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b as u8) << i));
        h = fnv1a_extend(h, &[byte]);
    }
    h
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    #[serde(rename = "i")]
    pub index: u64,
    #[serde(rename = "dir")]
    pub direction: Direction,
    #[serde(rename = "mod")]
    pub module: Module,
    pub kind: Kind,
    pub bits: u64,
    #[serde(rename = "sec")]
    pub section_id: Option<u32>,
    /// Chained digest after this entry, rendered as 16 hex digits.
    #[serde(with = "hex16")]
    pub digest: u64,
}

mod hex16 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:016x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let s = String::deserialize(d)?;
        u64::from_str_radix(&s, 16).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    entries: Vec<Entry>,
    totals: [u64; 3],
    digest: u64,
}

impl Transcript {
    pub fn new() -> Self {
        Self { entries: Vec::new(), totals: [0; 3], digest: FNV_OFFSET }
    }

    pub fn record(&mut self, msg: Message) {
        let index = self.entries.len() as u64;
        let mut h = self.digest;
        h = fnv1a_extend(h, &index.to_le_bytes());
        h = fnv1a_extend(
            h,
            &[msg.direction as u8, msg.module.index() as u8, msg.kind as u8],
        );
        h = fnv1a_extend(h, &msg.bits.to_le_bytes());
        h = fnv1a_extend(h, &msg.section_id.map_or(u64::MAX, u64::from).to_le_bytes());
        h = fnv1a_extend(h, &msg.payload_hash.to_le_bytes());
        self.digest = h;
        self.totals[msg.module.index()] += msg.bits;
        self.entries.push(Entry {
            index,
            direction: msg.direction,
            module: msg.module,
            kind: msg.kind,
            bits: msg.bits,
            section_id: msg.section_id,
            digest: h,
        });
    }

    pub fn extend<I: IntoIterator<Item = Message>>(&mut self, msgs: I) {
        for m in msgs {
            self.record(m);
        }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self, module: Module) -> u64 {
        self.totals[module.index()]
    }

    pub fn total_bits(&self) -> u64 {
        self.totals.iter().sum()
    }

    pub fn bits_of_kind(&self, kind: Kind) -> u64 {
        self.entries.iter().filter(|e| e.kind == kind).map(|e| e.bits).sum()
    }

    /// Chained digest over every recorded entry.
    pub fn digest(&self) -> u64 {
        self.digest
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.entries {
            serde_json::to_writer(&mut w, e)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    /// Parse JSON-lines back into entries (digests are taken as written).
    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<Entry>> {
        let mut out = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
            if line.trim().is_empty() {
                continue;
            }
            let e: Entry = serde_json::from_str(&line)
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
            out.push(e);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn charged(module: Module, kind: Kind, bits: u64) -> Message {
        Message::charged(Direction::AliceToBob, module, kind, bits, 0)
    }

    #[test]
    fn totals_per_module() {
        let mut t = Transcript::new();
        t.record(charged(Module::Matching, Kind::Pivots, 25));
        assert_eq!(t.total(Module::Matching), 25);

        let mut t = Transcript::new();
        t.record(charged(Module::Recovery, Kind::Syndrome, 3));
        t.record(charged(Module::Recovery, Kind::Delimiter, 4));
        assert_eq!(t.total(Module::Recovery), 7);
        assert_eq!(t.total_bits(), 7);
    }

    #[test]
    fn digest_is_order_sensitive() {
        let a = charged(Module::Recovery, Kind::Syndrome, 3);
        let b = charged(Module::Recovery, Kind::Delimiter, 4);
        let mut t1 = Transcript::new();
        t1.extend([a.clone(), b.clone()]);
        let mut t2 = Transcript::new();
        t2.extend([b, a]);
        assert_eq!(t1.total_bits(), t2.total_bits());
        assert_ne!(t1.digest(), t2.digest());
    }

    #[test]
    fn jsonl_shape() {
        let mut t = Transcript::new();
        let p: BitSeq = "1011".parse().unwrap();
        t.record(Message::with_payload(Direction::AliceToBob, Module::Matching, Kind::Pivots, &p));
        t.record(
            Message::charged(Direction::BobToAlice, Module::Recovery, Kind::CaseCode, 4, 9).in_section(3),
        );
        let text = t.to_jsonl();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with(r#"{"i":0,"dir":"A2B","mod":"I","kind":"Pivots","bits":4,"sec":null,"digest":""#));
        assert!(lines[1].contains(r#""dir":"B2A","mod":"II","kind":"CaseCode","bits":4,"sec":3"#));
        let back = Transcript::read_jsonl(text.as_bytes()).unwrap();
        assert_eq!(back, t.entries());
        assert_eq!(back[1].digest, t.digest());
    }
}
