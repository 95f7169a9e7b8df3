//! Bounds as `q -> 1` against their classical values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::eq_series;
use crate::functionals::{bieberbach_bounds, fs_bound, hankel_bound};
use crate::qcalc::ClassParams;

/// `mu` values of the Fekete–Szegő rows.
pub const LIMIT_MU: [f64; 5] = [-1.0, 0.0, 0.5, 1.0, 2.0];
/// Largest `n` of the coefficient rows.
pub const LIMIT_N: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEntry {
    pub label: String,
    pub value: f64,
    pub target: f64,
    pub abs_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub q: f64,
    pub entries: Vec<LimitEntry>,
}

impl LimitRow {
    pub fn entry(&self, label: &str) -> Option<&LimitEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn max_error(&self) -> f64 {
        self.entries.iter().map(|e| e.abs_error).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitTable {
    pub alpha: f64,
    pub rows: Vec<LimitRow>,
}

/// `prod_(k=2..n) (k - 2 alpha) / (n - 1)!`, the classical `c_n`.
pub fn classical_c(n: usize, alpha: f64) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * (k as f64 - 2.0 * alpha) / (k - 1) as f64)
}

fn entry(label: String, value: f64, target: f64) -> LimitEntry {
    LimitEntry {
        label,
        value,
        target,
        abs_error: (value - target).abs(),
    }
}

/// One row per `q`: Fekete–Szegő bounds for each of [`LIMIT_MU`], the Hankel
/// bound, the convex coefficient bounds and `c_n` for `n <= LIMIT_N`, each
/// with its classical target and absolute error. `q_list` must increase.
pub fn run_limit_sweep(q_list: &[f64], alpha: f64) -> Result<LimitTable> {
    if q_list.is_empty() {
        return Err(Error::Config("empty q list".into()));
    }
    if q_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("q list must be strictly increasing".into()));
    }
    let s = 1.0 - alpha;
    let mut rows = Vec::with_capacity(q_list.len());
    for &q in q_list {
        let params = ClassParams::with_order(q, alpha, LIMIT_N)?;
        let mut entries = Vec::new();
        for mu in LIMIT_MU {
            let target = (2.0 * (1.0 - 2.0 * mu) * s * s + s).abs().max(s);
            let value = fs_bound(&params, Complex64::new(mu, 0.0)).value;
            entries.push(entry(format!("fs[mu={mu}]"), value, target));
        }
        entries.push(entry("hankel".into(), hankel_bound(&params).value, s * s));
        let bounds = bieberbach_bounds(&params, LIMIT_N)?;
        for (n, &b) in bounds.iter().enumerate().skip(2) {
            entries.push(entry(format!("bieberbach[n={n}]"), b, classical_c(n, alpha) / n as f64));
        }
        let eq = eq_series(&params);
        for n in 2..=LIMIT_N {
            entries.push(entry(format!("c[n={n}]"), eq.c[n], classical_c(n, alpha)));
        }
        rows.push(LimitRow { q, entries });
    }
    Ok(LimitTable { alpha, rows })
}
