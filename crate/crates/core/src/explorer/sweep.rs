use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::refine::{refine, RefineOptions};
use super::report::{CellRecord, ExtremalValue, SweepReport};
use super::{pool, Functional, SweepConfig};
use crate::caratheodory::{p_series, sample_measure_with, Atom, AtomicMeasure};
use crate::classes::{convex_from_h, convex_from_measure, starlike_from_p, PROD_TOL};
use crate::error::{Error, Result};
use crate::extremal::{eq_series, f1_series, f2_series};
use crate::functionals::{
    bieberbach_bounds, fekete_szego_value, fs_bound, hankel_bound, hankel_value, Bound,
};
use crate::qcalc::ClassParams;
use crate::series::TruncatedSeries;

/// Where a candidate member came from; replay dispatches on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    StarlikeFromP,
    ConvexFromH,
    ConvexFromMeasure,
    F1,
    F2,
    Eq,
}

/// One `(q, alpha, mu)` cell of a sweep.
pub(crate) struct Cell {
    pub params: ClassParams,
    pub mu: Option<Complex64>,
    pub functional: Functional,
    n_check: usize,
    /// Bieberbach bounds indexed by `n`; empty for the other functionals.
    bounds: Vec<f64>,
}

impl Cell {
    pub fn new(
        functional: Functional,
        q: f64,
        alpha: f64,
        mu: Option<Complex64>,
        order: usize,
        n_check: usize,
    ) -> Result<Self> {
        let params = ClassParams::with_order(q, alpha, order)?;
        let bounds = match functional {
            Functional::Bieberbach => bieberbach_bounds(&params, n_check)?,
            _ => Vec::new(),
        };
        Ok(Self {
            params,
            mu,
            functional,
            n_check,
            bounds,
        })
    }

    pub fn bound(&self) -> Bound {
        match self.functional {
            Functional::Fs => fs_bound(&self.params, self.mu.unwrap_or_default()),
            Functional::H22 => hankel_bound(&self.params),
            Functional::Bieberbach => Bound {
                value: 1.0,
                conjectural: false,
            },
        }
    }

    fn value_of(&self, f: &TruncatedSeries) -> Result<f64> {
        let v = match self.functional {
            Functional::Fs => fekete_szego_value(f, self.mu.unwrap_or_default())?,
            Functional::H22 => hankel_value(f, 2, 2)?,
            Functional::Bieberbach => (2..=self.n_check)
                .map(|n| f.coeff(n).norm() / self.bounds[n])
                .fold(f64::NEG_INFINITY, f64::max),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InvalidInput(format!(
                "{} is not finite at q = {}, alpha = {}",
                self.functional.name(),
                self.params.q,
                self.params.alpha
            )))
        }
    }

    pub fn member(&self, source: Source, m: &AtomicMeasure) -> Result<TruncatedSeries> {
        let p = &self.params;
        match source {
            Source::StarlikeFromP => starlike_from_p(&p_series(m, p.order), p),
            Source::ConvexFromH => convex_from_h(&p_series(m, p.order), p, PROD_TOL),
            Source::ConvexFromMeasure => convex_from_measure(m, p),
            Source::F1 => Ok(f1_series(p)),
            Source::F2 => Ok(f2_series(p)),
            Source::Eq => Ok(eq_series(p).e_q),
        }
    }

    pub fn eval(&self, source: Source, m: &AtomicMeasure) -> Result<f64> {
        self.value_of(&self.member(source, m)?)
    }

    /// Best value over the sample constructions of this functional; ties keep
    /// the first construction.
    pub fn eval_sample(&self, m: &AtomicMeasure) -> Result<(f64, Source)> {
        let sources: &[Source] = match self.functional {
            Functional::Fs | Functional::H22 => &[Source::StarlikeFromP],
            Functional::Bieberbach => &[Source::ConvexFromH, Source::ConvexFromMeasure],
        };
        let mut best = (f64::NEG_INFINITY, sources[0]);
        for &s in sources {
            let v = self.eval(s, m)?;
            if v > best.0 {
                best = (v, s);
            }
        }
        Ok(best)
    }

    /// Closed-form extremals with the measure they come from at `alpha = 0`.
    pub fn extremals(&self) -> Vec<(Source, AtomicMeasure)> {
        match self.functional {
            Functional::Fs | Functional::H22 => vec![
                (Source::F1, AtomicMeasure::unit_mass(0.0)),
                (Source::F2, two_point_measure()),
            ],
            Functional::Bieberbach => vec![(Source::Eq, AtomicMeasure::unit_mass(0.0))],
        }
    }
}

fn two_point_measure() -> AtomicMeasure {
    AtomicMeasure::new(vec![
        Atom { weight: 0.5, angle: 0.0 },
        Atom { weight: 0.5, angle: PI },
    ])
    .expect("valid measure")
}

/// Sample `index` of a run: generator seeded with `seed` on stream `index`,
/// atom count uniform on `1..=k_atoms`.
pub(crate) fn sample(seed: u64, index: u64, k_atoms: usize) -> AtomicMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let k = rng.gen_range(1..=k_atoms);
    sample_measure_with(&mut rng, k).expect("k in range")
}

struct Candidate {
    value: f64,
    source: Source,
    measure: AtomicMeasure,
    sample: Option<usize>,
}

fn run_cell(cfg: &SweepConfig, cell: &Cell) -> Result<CellRecord> {
    let values: Vec<(f64, Source)> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| cell.eval_sample(&sample(cfg.seed, i as u64, cfg.k_atoms)))
        .collect::<Result<_>>()?;

    // samples that beat every earlier index; this set only grows with `samples`
    let mut records = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for (i, &(v, _)) in values.iter().enumerate() {
        if v > best {
            best = v;
            records.push(i);
        }
    }

    let opts = RefineOptions::default();
    let sampled: Vec<Candidate> = records
        .par_iter()
        .map(|&i| {
            let start = sample(cfg.seed, i as u64, cfg.k_atoms);
            let measure = if cfg.refine {
                refine(&start, |m| Ok(cell.eval_sample(m)?.0), &opts)?.0
            } else {
                start
            };
            let (value, source) = cell.eval_sample(&measure)?;
            Ok(Candidate {
                value,
                source,
                measure,
                sample: Some(i),
            })
        })
        .collect::<Result<_>>()?;

    let bound = cell.bound();
    let mut extremal_values = Vec::new();
    let mut candidates = Vec::new();
    if cfg.include_extremals {
        for (source, measure) in cell.extremals() {
            let value = cell.eval(source, &measure)?;
            let slack = bound.value - value;
            extremal_values.push(ExtremalValue {
                source,
                value,
                slack,
                violated: slack < -cfg.tol,
            });
            candidates.push(Candidate {
                value,
                source,
                measure,
                sample: None,
            });
        }
    }
    candidates.extend(sampled);

    // largest value, ties to the earliest candidate
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.value > candidates[best].value {
            best = i;
        }
    }
    let best = candidates.swap_remove(best);
    let slack = bound.value - best.value;
    Ok(CellRecord {
        q: cell.params.q,
        alpha: cell.params.alpha,
        mu: cell.mu.map(|m| [m.re, m.im]),
        functional: cell.functional,
        empirical_max: best.value,
        stated_bound: bound.value,
        conjectural: bound.conjectural,
        slack,
        violated: slack < -cfg.tol,
        argmax_measure: best.measure,
        argmax_source: best.source,
        argmax_sample: best.sample,
        extremals: extremal_values,
    })
}

pub(crate) fn cells(cfg: &SweepConfig) -> Result<Vec<Cell>> {
    let mus: Vec<Option<Complex64>> = match cfg.functional {
        Functional::Fs => cfg.mu_grid.iter().copied().map(Some).collect(),
        _ => vec![None],
    };
    let mut out = Vec::new();
    for &q in &cfg.q_grid {
        for &alpha in &cfg.alpha_grid {
            for &mu in &mus {
                out.push(Cell::new(cfg.functional, q, alpha, mu, cfg.order, cfg.n_check)?);
            }
        }
    }
    Ok(out)
}

/// Runs the sweep named by `cfg.functional`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let cells = cells(cfg)?;
    let records = pool(cfg.threads)?.install(|| {
        cells
            .iter()
            .map(|cell| run_cell(cfg, cell))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SweepReport::new(cfg.clone(), records))
}

fn expect(cfg: &SweepConfig, f: Functional) -> Result<()> {
    if cfg.functional == f {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "expected functional {}, config has {}",
            f.name(),
            cfg.functional.name()
        )))
    }
}

/// Fekete–Szegő sweep over `starlike_from_p` members.
pub fn run_fs_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    expect(cfg, Functional::Fs)?;
    run_sweep(cfg)
}

/// `|a_2 a_4 - a_3^2|` sweep; each cell lists the `F_1` and `F_2` values
/// when extremals are included.
pub fn run_hankel_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    expect(cfg, Functional::H22)?;
    run_sweep(cfg)
}

/// Coefficient-ratio sweep over `convex_from_h` and `convex_from_measure`.
pub fn run_bieberbach_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    expect(cfg, Functional::Bieberbach)?;
    run_sweep(cfg)
}
