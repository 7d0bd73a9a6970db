//! Protocol tunables and their validation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codes::CodeSpec;
use crate::error::{Error, Result};

/// How Module III charges its correction bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EcPolicy {
    /// Capacity of the measured residual error rate plus a 64-bit verification digest.
    #[default]
    Empirical,
    /// Capacity at substitution rate 2β regardless of the outcome.
    Theoretical,
}

impl FromStr for EcPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "empirical" => Ok(EcPolicy::Empirical),
            "theoretical" => Ok(EcPolicy::Theoretical),
            other => Err(Error::Parse(format!("unknown ec policy {other:?}"))),
        }
    }
}

impl fmt::Display for EcPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EcPolicy::Empirical => "empirical",
            EcPolicy::Theoretical => "theoretical",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Length of Alice's sequence in bits.
    pub n: usize,
    /// Deletion rate, in (0, 0.5].
    pub beta: f64,
    /// Segment length multiplier.
    pub s: f64,
    /// Delimiter length coefficient.
    pub c: f64,
    /// Largest deletion count the codes correct directly.
    pub w: usize,
    /// Code efficiencies a_1..a_w.
    pub a: Vec<f64>,
    pub seed: u64,
    pub ec_policy: EcPolicy,
}

impl ProtocolParams {
    /// The two-deletion configuration: VT for one deletion, a 7 log q code for two.
    pub fn improved(n: usize, beta: f64, s: f64, seed: u64) -> Self {
        Self { n, beta, s, c: 3.0, w: 2, a: vec![1.0, 3.5], seed, ec_policy: EcPolicy::Empirical }
    }

    /// VT-only configuration.
    pub fn baseline(n: usize, beta: f64, s: f64, seed: u64) -> Self {
        Self { n, beta, s, c: 3.0, w: 1, a: vec![1.0], seed, ec_policy: EcPolicy::Empirical }
    }

    pub fn with_policy(mut self, policy: EcPolicy) -> Self {
        self.ec_policy = policy;
        self
    }

    /// L_S = round(s/β), at least 1.
    pub fn segment_len(&self) -> usize {
        ((self.s / self.beta).round() as usize).max(1)
    }

    pub fn pivot_len(&self) -> usize {
        crate::matching::pivot_length(self.s, self.beta)
    }

    pub fn a_max(&self) -> f64 {
        self.a.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn code_spec(&self) -> CodeSpec {
        CodeSpec::new(self.a.clone(), crate::rng::derive_seed(self.seed, crate::rng::LABEL_CODE_KEY))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.beta > 0.0 && self.beta <= 0.5) {
            return bad(format!("beta must lie in (0, 0.5], got {}", self.beta));
        }
        if !(self.s > 0.0 && self.s.is_finite()) {
            return bad(format!("s must be positive, got {}", self.s));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad(format!("c must be positive, got {}", self.c));
        }
        if self.w == 0 {
            return bad("w must be at least 1".into());
        }
        if self.a.len() != self.w {
            return bad(format!("expected {} code efficiencies, got {}", self.w, self.a.len()));
        }
        if let Some(a) = self.a.iter().find(|&&a| !(a >= 1.0 && a.is_finite())) {
            return bad(format!("code efficiencies must be >= 1, got {a}"));
        }
        let (ls, lp) = (self.segment_len(), self.pivot_len());
        if lp >= ls {
            return bad(format!("pivot length {lp} must be shorter than segment length {ls}"));
        }
        Ok(())
    }
}
