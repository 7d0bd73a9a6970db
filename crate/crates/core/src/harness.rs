//! Seeded experiment sweeps comparing protocol variants on shared channel draws.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_deletion_channel, ChannelOutcome};
use crate::error::{Error, Result};
use crate::params::{EcPolicy, ProtocolParams};
use crate::protocol::{self, Metrics, SyncOutput};
use crate::rng;
use crate::seq::BitSeq;

/// A protocol configuration under comparison. `s = None` follows the sweep's s grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub name: String,
    pub w: usize,
    pub a: Vec<f64>,
    pub c: f64,
    pub s: Option<f64>,
}

impl Variant {
    pub fn baseline() -> Self {
        Self { name: "baseline".into(), w: 1, a: vec![1.0], c: 3.0, s: None }
    }

    pub fn improved() -> Self {
        Self { name: "improved".into(), w: 2, a: vec![1.0, 3.5], c: 3.0, s: None }
    }

    pub fn params(&self, n: usize, beta: f64, s: f64, seed: u64, policy: EcPolicy) -> ProtocolParams {
        ProtocolParams {
            n,
            beta,
            s: self.s.unwrap_or(s),
            c: self.c,
            w: self.w,
            a: self.a.clone(),
            seed,
            ec_policy: policy,
        }
    }
}

/// Expand an efficiency list to length `w`. A single value `v` with `w > 1`
/// means VT for one deletion and `v` for the rest.
pub fn expand_efficiencies(w: usize, a: &[f64]) -> Result<Vec<f64>> {
    match a.len() {
        n if n == w => Ok(a.to_vec()),
        1 if w > 1 => Ok(std::iter::once(1.0).chain(std::iter::repeat_n(a[0], w - 1)).collect()),
        n => Err(Error::InvalidConfig(format!("{n} efficiencies given for w = {w}"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub beta_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub variants: Vec<Variant>,
    pub trials: usize,
    /// First trial seed; trial `i` uses `seed + i`.
    pub seed: u64,
    pub ec_policy: EcPolicy,
    pub csv: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 50_000,
            beta_grid: vec![0.01],
            s_grid: vec![2.0],
            variants: vec![Variant::baseline(), Variant::improved()],
            trials: 20,
            seed: 0,
            ec_policy: EcPolicy::Empirical,
            csv: None,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Parse(format!("{key}: bad value {s:?}"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Parse(format!("{key}: bad value {v:?}")))
}

fn parse_variant(spec: &str) -> Result<Variant> {
    let mut words = spec.split_whitespace();
    let name = words.next().ok_or_else(|| Error::Parse("variant needs a name".into()))?;
    let mut v = Variant { name: name.to_string(), w: 1, a: vec![1.0], c: 3.0, s: None };
    let mut a = None;
    for word in words {
        let (k, val) = word.split_once('=').ok_or_else(|| Error::Parse(format!("variant {name}: expected key=value, got {word:?}")))?;
        match k {
            "w" => v.w = parse_one(k, val)?,
            "a" => a = Some(parse_list::<f64>(k, val)?),
            "c" => v.c = parse_one(k, val)?,
            "s" => v.s = Some(parse_one(k, val)?),
            _ => return Err(Error::Parse(format!("variant {name}: unknown key {k:?}"))),
        }
    }
    v.a = match a {
        Some(a) => expand_efficiencies(v.w, &a)?,
        None => vec![1.0; v.w],
    };
    Ok(v)
}

impl ExperimentConfig {
    /// Parse the flat `key = value` format. `#` starts a comment; `variant`
    /// may repeat and replaces the default pair when present.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut variants = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" => cfg.n = parse_one(key, value)?,
                "beta_grid" | "beta" => cfg.beta_grid = parse_list(key, value)?,
                "s_grid" | "s" => cfg.s_grid = parse_list(key, value)?,
                "trials" => cfg.trials = parse_one(key, value)?,
                "seed" => cfg.seed = parse_one(key, value)?,
                "ec_policy" => cfg.ec_policy = value.parse()?,
                "csv" => cfg.csv = Some(PathBuf::from(value)),
                "variant" => variants.push(parse_variant(value)?),
                _ => return Err(Error::Parse(format!("line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        if !variants.is_empty() {
            cfg.variants = variants;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta_grid.is_empty() {
            return Err(Error::InvalidConfig("beta_grid is empty".into()));
        }
        if self.s_grid.is_empty() {
            return Err(Error::InvalidConfig("s_grid is empty".into()));
        }
        if self.variants.is_empty() {
            return Err(Error::InvalidConfig("no protocol variants".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be positive".into()));
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.trials as u64).map(move |i| self.seed.wrapping_add(i))
    }
}

/// One CSV row: a single variant on a single channel draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    #[serde(skip)]
    pub variant: String,
    pub n: usize,
    pub beta: f64,
    pub s: f64,
    pub w: usize,
    pub c: f64,
    pub a_max: f64,
    pub seed: u64,
    #[serde(rename = "bits_I")]
    pub bits_i: u64,
    #[serde(rename = "bits_II")]
    pub bits_ii: u64,
    #[serde(rename = "bits_III")]
    pub bits_iii: u64,
    pub bits_total: u64,
    pub rounds_seq: u64,
    pub rounds_par: u64,
    pub selected_pivots: u64,
    pub false_pivots: u64,
    pub residual_errors: u64,
    pub synchronized: bool,
    pub runtime_ms: u64,
}

pub const CSV_HEADER: &str = "n,beta,s,w,c,a_max,seed,bits_I,bits_II,bits_III,bits_total,rounds_seq,rounds_par,selected_pivots,false_pivots,residual_errors,synchronized,runtime_ms";

impl Row {
    fn new(variant: &str, p: &ProtocolParams, m: &Metrics) -> Self {
        Self {
            variant: variant.to_string(),
            n: p.n,
            beta: p.beta,
            s: p.s,
            w: p.w,
            c: p.c,
            a_max: p.a_max(),
            seed: p.seed,
            bits_i: m.bits_i,
            bits_ii: m.bits_ii,
            bits_iii: m.bits_iii,
            bits_total: m.bits_total,
            rounds_seq: m.rounds_sequential,
            rounds_par: m.rounds_parallel,
            selected_pivots: m.selected_pivots,
            false_pivots: m.false_pivots,
            residual_errors: m.residual_errors,
            synchronized: m.synchronized,
            runtime_ms: m.runtime_ms,
        }
    }
}

/// The source string and channel draw for one seed.
pub fn draw(n: usize, beta: f64, seed: u64) -> (BitSeq, ChannelOutcome) {
    let x = rng::random_bits(&mut rng::stream(seed, rng::LABEL_SOURCE), n);
    let ch = apply_deletion_channel(&x, beta, &mut rng::stream(seed, rng::LABEL_CHANNEL));
    (x, ch)
}

/// Run a session against the channel's ground truth and record wall time.
pub fn timed_session(x: &BitSeq, ch: &ChannelOutcome, params: &ProtocolParams) -> Result<SyncOutput> {
    let start = Instant::now();
    let mut out = protocol::synchronize_with_truth(x, ch, params)?;
    out.metrics.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(out)
}

/// Every variant on one shared `(X, Y)` draw.
pub fn run_point(n: usize, beta: f64, s: f64, variants: &[Variant], seed: u64, policy: EcPolicy) -> Vec<Row> {
    let (x, ch) = draw(n, beta, seed);
    variants
        .iter()
        .map(|v| {
            let p = v.params(n, beta, s, seed, policy);
            match timed_session(&x, &ch, &p) {
                Ok(out) => Row::new(&v.name, &p, &out.metrics),
                Err(_) => Row::new(&v.name, &p, &Metrics::default()),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    pub rows: Vec<Row>,
    /// Grid points left out, with the validation error.
    pub skipped: Vec<String>,
}

impl SweepResult {
    pub fn all_synchronized(&self) -> bool {
        self.rows.iter().all(|r| r.synchronized)
    }
}

/// Run the full grid in parallel. Rows come back ordered by
/// `(beta, s, seed, variant)` whatever the execution order.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut skipped = Vec::new();
    let mut jobs = Vec::new();
    for &beta in &cfg.beta_grid {
        for &s in &cfg.s_grid {
            let mut ok = true;
            for v in &cfg.variants {
                if let Err(e) = v.params(cfg.n, beta, s, cfg.seed, cfg.ec_policy).validate() {
                    skipped.push(format!("beta={beta} s={s} variant={}: {e}", v.name));
                    ok = false;
                }
            }
            if ok {
                jobs.extend(cfg.seeds().map(|seed| (beta, s, seed)));
            }
        }
    }
    let rows: Vec<Row> = jobs
        .par_iter()
        .flat_map_iter(|&(beta, s, seed)| run_point(cfg.n, beta, s, &cfg.variants, seed, cfg.ec_policy))
        .collect();
    let result = SweepResult { rows, skipped };
    if let Some(path) = &cfg.csv {
        write_csv(path, &result.rows)?;
    }
    Ok(result)
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn read_csv(path: &Path) -> Result<Vec<Row>> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

/// Mean and normal-approximation 95% half-width.
pub fn mean_ci(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => (v[n / 2 - 1] + v[n / 2]) / 2.0,
    }
}
