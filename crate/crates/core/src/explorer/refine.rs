//! Coordinate ascent over the atoms of a measure.

use crate::caratheodory::{Atom, AtomicMeasure};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineOptions {
    pub max_iter: usize,
    /// Ascent stops once the step falls below this.
    pub tol: f64,
    /// First step, in radians for angles and in log-weight for weights.
    pub initial_step: f64,
    pub min_weight: f64,
    /// Smallest circular distance between two atoms.
    pub min_separation: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-12,
            initial_step: 0.25,
            min_weight: 1e-4,
            min_separation: 1e-3,
        }
    }
}

fn min_weight(m: &AtomicMeasure) -> f64 {
    m.atoms().iter().map(|a| a.weight).fold(f64::INFINITY, f64::min)
}

fn min_separation(m: &AtomicMeasure) -> f64 {
    let atoms = m.atoms();
    let mut best = f64::INFINITY;
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            let d = (atoms[i].angle - atoms[j].angle).rem_euclid(std::f64::consts::TAU);
            best = best.min(d.min(std::f64::consts::TAU - d));
        }
    }
    best
}

/// Maximizes `objective` by moving one angle or one weight at a time,
/// halving the step whenever a full sweep brings no improvement.
///
/// Moves that push a weight below `min_weight` or two atoms closer than
/// `min_separation` are rejected (a start point already past a guard only has
/// to stay where it is). Returns the final measure and its value.
pub fn refine<F>(start: &AtomicMeasure, objective: F, opts: &RefineOptions) -> Result<(AtomicMeasure, f64)>
where
    F: Fn(&AtomicMeasure) -> Result<f64>,
{
    let weight_floor = opts.min_weight.min(min_weight(start));
    let sep_floor = opts.min_separation.min(min_separation(start));
    let allowed = |m: &AtomicMeasure| min_weight(m) >= weight_floor && min_separation(m) >= sep_floor;

    let mut cur = start.clone();
    let mut cur_val = objective(&cur)?;
    let mut step = opts.initial_step;
    let k = cur.atoms().len();
    // angle coordinates first, then weights (which only matter with two or more atoms)
    let coords = if k > 1 { 2 * k } else { 1 };

    for _ in 0..opts.max_iter {
        let mut improved = false;
        for c in 0..coords {
            for dir in [1.0, -1.0] {
                let mut atoms: Vec<Atom> = cur.atoms().to_vec();
                if c < k {
                    atoms[c].angle += dir * step;
                } else {
                    atoms[c - k].weight *= (dir * step).exp();
                }
                let cand = AtomicMeasure::normalized(atoms);
                if !allowed(&cand) {
                    continue;
                }
                let v = objective(&cand)?;
                if v > cur_val {
                    cur = cand;
                    cur_val = v;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step /= 2.0;
            if step < opts.tol {
                break;
            }
        }
    }
    Ok((cur, cur_val))
}
