//! Seeded extremal search over `(q, alpha, mu)` grids.
//!
//! Every cell maximizes one coefficient functional over random class members
//! (plus the closed-form extremals when asked) and compares the maximum with
//! the stated bound. Violations are ordinary report rows, never errors.
//!
//! Sample `i` draws from `ChaCha8Rng` seeded with the run seed on stream `i`,
//! so a sample does not depend on which worker evaluates it. Workers come
//! from `QSCHLICHT_THREADS` (default: all cores) and every reduction runs in
//! index order afterwards, so reports are byte-identical for any thread count.

mod limits;
mod refine;
mod report;
mod sweep;
mod verify;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::caratheodory::MAX_ATOMS;
use crate::error::{Error, Result};
use crate::qcalc::MAX_ORDER;

pub use limits::{run_limit_sweep, LimitEntry, LimitRow, LimitTable};
pub use refine::{refine, RefineOptions};
pub use report::{
    replay_cell, CellRecord, ExtremalValue, ReplayCheck, SweepReport, CSV_HEADER,
};
pub use sweep::{run_bieberbach_sweep, run_fs_sweep, run_hankel_sweep, run_sweep, Source};
pub use verify::{verify, Check, Suite, VerifyReport};

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "QSCHLICHT_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `|a_3 - mu a_2^2|` over `S*_q(alpha)`.
    Fs,
    /// `|a_2 a_4 - a_3^2|` over `S*_q(alpha)`.
    H22,
    /// `max_n |a_n| / bound_n` over `C_q(alpha)`.
    Bieberbach,
}

impl Functional {
    pub fn name(self) -> &'static str {
        match self {
            Functional::Fs => "fs",
            Functional::H22 => "h22",
            Functional::Bieberbach => "bieberbach",
        }
    }
}

impl std::str::FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fs" => Ok(Functional::Fs),
            "h22" => Ok(Functional::H22),
            "bieberbach" => Ok(Functional::Bieberbach),
            other => Err(Error::Config(format!("unknown functional {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub seed: u64,
    pub samples: usize,
    pub q_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    /// Only used by the Fekete–Szegő functional.
    pub mu_grid: Vec<Complex64>,
    /// Truncation order of the sampled members.
    pub order: usize,
    /// Each sample has between 1 and `k_atoms` atoms.
    pub k_atoms: usize,
    pub include_extremals: bool,
    pub functional: Functional,
    /// Largest coefficient index checked by the Bieberbach functional.
    pub n_check: usize,
    /// `violated` means `slack < -tol`.
    pub tol: f64,
    /// Run coordinate ascent on every prefix-record sample.
    pub refine: bool,
    /// Worker count; overrides the environment. Not part of the report.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl SweepConfig {
    pub fn new(functional: Functional) -> Self {
        Self {
            seed: 0,
            samples: 1000,
            q_grid: vec![0.5],
            alpha_grid: vec![0.0],
            mu_grid: vec![Complex64::new(0.0, 0.0)],
            order: 12,
            k_atoms: 4,
            include_extremals: true,
            functional,
            n_check: 10,
            tol: 1e-7,
            refine: true,
            threads: None,
        }
    }

    fn min_order(&self) -> usize {
        match self.functional {
            Functional::Fs | Functional::H22 => 4,
            Functional::Bieberbach => self.n_check.max(4),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.q_grid.is_empty() || self.alpha_grid.is_empty() {
            return bad("q and alpha grids must be non-empty".into());
        }
        if let Some(q) = self.q_grid.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
            return bad(format!("q = {q} is outside (0, 1)"));
        }
        if let Some(a) = self.alpha_grid.iter().find(|a| !(0.0..1.0).contains(*a)) {
            return bad(format!("alpha = {a} is outside [0, 1)"));
        }
        if self.functional == Functional::Fs {
            if self.mu_grid.is_empty() {
                return bad("the fs functional needs a non-empty mu grid".into());
            }
            if self.mu_grid.iter().any(|m| !m.is_finite()) {
                return bad("mu values must be finite".into());
            }
        }
        if !(1..=MAX_ATOMS).contains(&self.k_atoms) {
            return bad(format!("k_atoms = {} is outside [1, {MAX_ATOMS}]", self.k_atoms));
        }
        if self.functional == Functional::Bieberbach && self.n_check < 2 {
            return bad("n_check must be at least 2".into());
        }
        if self.order < self.min_order() || self.order > MAX_ORDER {
            return bad(format!(
                "order {} must lie in [{}, {MAX_ORDER}]",
                self.order,
                self.min_order()
            ));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return bad(format!("tol = {} must be finite and non-negative", self.tol));
        }
        if self.samples == 0 && !self.include_extremals {
            return bad("nothing to evaluate: no samples and no extremals".into());
        }
        if self.threads == Some(0) {
            return bad("thread count must be positive".into());
        }
        Ok(())
    }
}

/// Worker count: the override, else `QSCHLICHT_THREADS`, else all cores.
pub fn thread_count(override_threads: Option<usize>) -> Result<usize> {
    if let Some(n) = override_threads {
        return if n > 0 {
            Ok(n)
        } else {
            Err(Error::Config("thread count must be positive".into()))
        };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn pool(override_threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(override_threads)?)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}
