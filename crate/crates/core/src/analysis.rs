//! Closed-form leading-term bounds. All logs are base 2; o(.) terms are dropped.

use std::io;

use serde::Serialize;

/// Redundancy coefficient `r(s, w, a, c)`, the multiplier of `n β log(1/β)`.
pub fn redundancy_coefficient(s: f64, w: usize, a: f64, c: f64) -> f64 {
    assert!(s > 0.0 && w >= 1 && a >= 1.0 && c > 0.0, "invalid (s={s}, w={w}, a={a}, c={c})");
    2.0 * (s + 1.0) / s * (delimiter_factor(w) * c + a + 2.0)
}

/// `2^w / (2^w - 1)`.
pub fn delimiter_factor(w: usize) -> f64 {
    let p = 2f64.powi(w as i32);
    p / (p - 1.0)
}

/// Leading coefficient of the earlier single-deletion protocol's bound.
pub fn baseline_bound_coefficient(c: f64) -> f64 {
    assert!(c > 0.0, "c must be positive");
    8.0 * (4.0 * c + 1.0) + 5.0
}

/// `n β log2(1/β)`.
pub fn scale(n: usize, beta: f64) -> f64 {
    n as f64 * beta * (1.0 / beta).log2()
}

/// Per-module leading coefficients of `n β log(1/β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModuleCoefficients {
    pub n_i: f64,
    pub n_ii: f64,
    pub n_iii: f64,
}

impl ModuleCoefficients {
    pub fn new(s: f64, w: usize, a: f64, c: f64) -> Self {
        assert!(s > 0.0 && w >= 1 && a >= 1.0 && c > 0.0, "invalid (s={s}, w={w}, a={a}, c={c})");
        Self {
            n_i: 2.0 / s,
            n_ii: 2.0 * (s + 1.0) / s * (delimiter_factor(w) * c + a),
            n_iii: 2.0,
        }
    }

    pub fn sum(&self) -> f64 {
        self.n_i + self.n_ii + self.n_iii
    }
}

/// Leading-term bit bounds `(N_I, N_II, N_III)`.
pub fn module_bit_bounds(n: usize, beta: f64, s: f64, w: usize, a: f64, c: f64) -> (f64, f64, f64) {
    let k = ModuleCoefficients::new(s, w, a, c);
    let z = scale(n, beta);
    (k.n_i * z, k.n_ii * z, k.n_iii * z)
}

/// Mean delimiter bits for a section with `t` deletions and delimiter length `l`.
pub fn expected_delimiter_bits_bound(t: usize, w: usize, l: usize) -> f64 {
    if t <= w {
        0.0
    } else {
        delimiter_factor(w) * (t - 1) as f64 * l as f64
    }
}

/// Mean code bits for a section of length `n_s` with `t` deletions.
pub fn expected_code_bits_bound(t: usize, a: f64, n_s: usize) -> f64 {
    assert!(n_s >= 2, "section length must be at least 2");
    a * t as f64 * (n_s as f64).log2()
}

/// Leading-term bounds for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub r: f64,
    pub improved_bits: f64,
    pub baseline_bits: f64,
    pub n_i_bound: f64,
    pub n_ii_bound: f64,
    pub n_iii_bound: f64,
}

impl BoundReport {
    pub fn new(n: usize, beta: f64, s: f64, w: usize, a: f64, c: f64) -> Self {
        let z = scale(n, beta);
        let (n_i_bound, n_ii_bound, n_iii_bound) = module_bit_bounds(n, beta, s, w, a, c);
        let r = redundancy_coefficient(s, w, a, c);
        Self { r, improved_bits: r * z, baseline_bits: baseline_bound_coefficient(c) * z, n_i_bound, n_ii_bound, n_iii_bound }
    }
}

/// One row of the coefficient table over `(s, w)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub s: f64,
    pub w: usize,
    pub a: f64,
    pub c: f64,
    pub r: f64,
    pub n_i: f64,
    pub n_ii: f64,
    pub n_iii: f64,
}

pub fn coefficient_table(s_grid: &[f64], w_grid: &[usize], a: f64, c: f64) -> Vec<CoefficientRow> {
    let mut rows = Vec::with_capacity(s_grid.len() * w_grid.len());
    for &w in w_grid {
        for &s in s_grid {
            let k = ModuleCoefficients::new(s, w, a, c);
            rows.push(CoefficientRow { s, w, a, c, r: redundancy_coefficient(s, w, a, c), n_i: k.n_i, n_ii: k.n_ii, n_iii: k.n_iii });
        }
    }
    rows
}

/// Write the table as CSV with header `s,w,a,c,r,n_i,n_ii,n_iii`.
pub fn write_coefficient_csv<W: io::Write>(w: W, rows: &[CoefficientRow]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
