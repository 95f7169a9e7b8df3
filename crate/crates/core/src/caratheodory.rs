//! The Carathéodory class through finite atomic Herglotz measures.
//!
//! A probability measure `sum_j t_j delta(sigma_j)` on the unit circle gives
//! `p(z) = sum_j t_j (1 + sigma_j z) / (1 - sigma_j z)`, so `p_0 = 1` and
//! `p_n = 2 sum_j t_j sigma_j^n`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::series::TruncatedSeries;

/// Upper bound on the number of atoms in a measure.
pub const MAX_ATOMS: usize = 8;

/// Allowed deviation of the total mass from 1 when loading a measure.
pub const MASS_TOL: f64 = 1e-9;

/// Name of the generator behind [`sample_measure`], echoed into reports.
pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub weight: f64,
    pub angle: f64,
}

impl Atom {
    pub fn location(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }
}

#[derive(Deserialize)]
struct RawMeasure {
    atoms: Vec<Atom>,
}

/// Finite probability measure on the unit circle.
///
/// Weights are strictly positive and sum to one; angles live in `[0, 2pi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl TryFrom<RawMeasure> for AtomicMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        Self::new(raw.atoms)
    }
}

fn canonical_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl AtomicMeasure {
    /// Validates and canonicalizes: total mass must be within [`MASS_TOL`]
    /// of one and is then renormalized exactly.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        if atoms.len() > MAX_ATOMS {
            return Err(Error::InvalidMeasure(format!(
                "{} atoms, at most {MAX_ATOMS} allowed",
                atoms.len()
            )));
        }
        for (i, a) in atoms.iter().enumerate() {
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "atom {i} has non-positive weight {}",
                    a.weight
                )));
            }
            if !a.angle.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom {i} has a non-finite angle")));
            }
        }
        let mass: f64 = atoms.iter().map(|a| a.weight).sum();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("total mass {mass} is not 1")));
        }
        Ok(Self::normalized(atoms))
    }

    /// Renormalizes arbitrary positive weights. Used internally by samplers
    /// and the explorer's refinement, which move weights freely.
    pub(crate) fn normalized(atoms: Vec<Atom>) -> Self {
        let mass: f64 = atoms.iter().map(|a| a.weight).sum();
        Self {
            atoms: atoms
                .into_iter()
                .map(|a| Atom {
                    weight: a.weight / mass,
                    angle: canonical_angle(a.angle),
                })
                .collect(),
        }
    }

    pub fn unit_mass(angle: f64) -> Self {
        Self::normalized(vec![Atom { weight: 1.0, angle }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Pushes every atom forward by `e^(i theta)`.
    pub fn rotated(&self, theta: f64) -> Self {
        Self::normalized(
            self.atoms
                .iter()
                .map(|a| Atom {
                    weight: a.weight,
                    angle: a.angle + theta,
                })
                .collect(),
        )
    }

    /// First moment `sum_j t_j sigma_j`.
    pub fn first_moment(&self) -> Complex64 {
        self.atoms.iter().map(|a| a.location() * a.weight).sum()
    }

    /// Rotation that makes `p_1` real and non-negative.
    pub fn rotation_normalized(&self) -> Self {
        let m = self.first_moment();
        if m.norm() == 0.0 {
            return self.clone();
        }
        self.rotated(-m.arg())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidMeasure(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serializes")
    }
}

/// Taylor coefficients of the Herglotz function of `m` up to `order`.
pub fn p_series(m: &AtomicMeasure, order: usize) -> TruncatedSeries {
    let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
    out[0] = Complex64::new(1.0, 0.0);
    for atom in m.atoms() {
        let sigma = atom.location();
        let mut pow = Complex64::new(1.0, 0.0);
        for c in out.iter_mut().skip(1) {
            pow *= sigma;
            *c += pow * (2.0 * atom.weight);
        }
    }
    TruncatedSeries::from_vec(out)
}

const DOMAIN_SLACK: f64 = 1e-12;

/// `(p_2, p_3)` from `p_1` and the two free disk parameters.
///
/// `xi` and `zeta` are the unit-disk parameters with
/// `2 p_2 = p_1^2 + xi (4 - p_1^2)` and
/// `4 p_3 = p_1^3 + 2 (4 - p_1^2) p_1 xi - p_1 (4 - p_1^2) xi^2
///          + 2 (4 - p_1^2) (1 - |xi|^2) zeta`.
pub fn extend_p23(p1: f64, xi: Complex64, zeta: Complex64) -> Result<(Complex64, Complex64)> {
    check_range("p1", p1, (0.0..=2.0).contains(&p1), "[0, 2]")?;
    check_range("|xi|", xi.norm(), xi.norm() <= 1.0 + DOMAIN_SLACK, "[0, 1]")?;
    check_range("|zeta|", zeta.norm(), zeta.norm() <= 1.0 + DOMAIN_SLACK, "[0, 1]")?;
    let d = 4.0 - p1 * p1;
    let p2 = (xi * d + p1 * p1) / 2.0;
    let p3 = (xi * (2.0 * d * p1) - xi * xi * (p1 * d)
        + zeta * (2.0 * d * (1.0 - xi.norm_sqr()))
        + p1 * p1 * p1)
        / 4.0;
    Ok((p2, p3))
}

/// Inverse of [`extend_p23`] on the well-conditioned interior.
///
/// Needs `0 < p1 < 2` and `|xi| < 1 - 1e-6`; otherwise the parametrization
/// loses `zeta` and `DegenerateParametrization` is returned.
pub fn recover_xi_zeta(p1: f64, p2: Complex64, p3: Complex64) -> Result<(Complex64, Complex64)> {
    if !p1.is_finite() || p1 <= 0.0 || p1 >= 2.0 {
        return Err(Error::DegenerateParametrization("p1 must lie strictly inside (0, 2)"));
    }
    let d = 4.0 - p1 * p1;
    let xi = (p2 * 2.0 - p1 * p1) / d;
    if xi.norm() >= 1.0 - 1e-6 {
        return Err(Error::DegenerateParametrization("|xi| too close to 1"));
    }
    let num = p3 * 4.0 - p1 * p1 * p1 - xi * (2.0 * d * p1) + xi * xi * (p1 * d);
    let zeta = num / (2.0 * d * (1.0 - xi.norm_sqr()));
    Ok((xi, zeta))
}

/// Slack in `|p_2 - lambda p_1^2| <= 2 max{1, |2 lambda - 1|}`.
pub fn mm_gap(p: &TruncatedSeries, lambda: f64) -> f64 {
    let bound = 2.0 * 1f64.max((2.0 * lambda - 1.0).abs());
    let p1 = p.coeff(1);
    bound - (p.coeff(2) - p1 * p1 * lambda).norm()
}

/// Deterministic random measure with `k_atoms` atoms.
///
/// Angles are uniform on `[0, 2pi)`; weights are normalized standard
/// exponential draws (a flat Dirichlet sample), so every weight is positive.
pub fn sample_measure(seed: u64, k_atoms: usize) -> Result<AtomicMeasure> {
    sample_measure_with(&mut ChaCha8Rng::seed_from_u64(seed), k_atoms)
}

/// [`sample_measure`] drawing from a caller-supplied generator.
pub fn sample_measure_with<R: Rng + ?Sized>(rng: &mut R, k_atoms: usize) -> Result<AtomicMeasure> {
    if !(1..=MAX_ATOMS).contains(&k_atoms) {
        return Err(Error::Range {
            name: "k_atoms",
            value: k_atoms as f64,
            range: "[1, 8]",
        });
    }
    let atoms = (0..k_atoms)
        .map(|_| {
            let angle = rng.gen::<f64>() * TAU;
            let u: f64 = rng.sample(Open01);
            Atom {
                weight: -u.ln(),
                angle,
            }
        })
        .collect();
    Ok(AtomicMeasure::normalized(atoms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_atom_series() {
        let p = p_series(&AtomicMeasure::unit_mass(0.0), 6);
        for n in 1..=6 {
            assert!((p.coeff(n) - 2.0).norm() < 1e-15);
        }
        let p = p_series(&AtomicMeasure::unit_mass(PI), 6);
        for n in 1..=6 {
            let want = if n % 2 == 0 { 2.0 } else { -2.0 };
            assert!((p.coeff(n) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn two_symmetric_atoms() {
        let m = AtomicMeasure::new(vec![
            Atom { weight: 0.5, angle: 0.0 },
            Atom { weight: 0.5, angle: PI },
        ])
        .unwrap();
        let p = p_series(&m, 8);
        assert_eq!(p.coeff(0), c(1.0, 0.0));
        for n in 1..=8 {
            let want = if n % 2 == 0 { 2.0 } else { 0.0 };
            assert!((p.coeff(n) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn extend_examples() {
        let (p2, p3) = extend_p23(2.0, c(0.3, -0.4), c(-0.9, 0.1)).unwrap();
        assert!((p2 - 2.0).norm() < 1e-15 && (p3 - 2.0).norm() < 1e-15);
        let (p2, p3) = extend_p23(0.0, c(1.0, 0.0), c(0.2, 0.7)).unwrap();
        assert!((p2 - 2.0).norm() < 1e-15 && p3.norm() < 1e-15);
        let (p2, p3) = extend_p23(1.0, c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((p2 - 0.5).norm() < 1e-15 && (p3 - 1.75).norm() < 1e-15);
        assert!(extend_p23(2.5, c(0.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(extend_p23(1.0, c(1.1, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn recover_rejects_boundary() {
        let p = p_series(&AtomicMeasure::unit_mass(0.0), 3);
        assert!(matches!(
            recover_xi_zeta(p.coeff(1).re, p.coeff(2), p.coeff(3)),
            Err(Error::DegenerateParametrization(_))
        ));
        assert!(recover_xi_zeta(0.0, c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn recover_round_trip_example() {
        let (xi, zeta) = (c(0.3, -0.5), c(-0.2, 0.6));
        let (p2, p3) = extend_p23(1.3, xi, zeta).unwrap();
        let (x, z) = recover_xi_zeta(1.3, p2, p3).unwrap();
        assert!((x - xi).norm() < 1e-12 && (z - zeta).norm() < 1e-12);
    }

    #[test]
    fn mm_gap_examples() {
        let p = p_series(&AtomicMeasure::unit_mass(0.0), 3);
        assert!(mm_gap(&p, 0.0).abs() < 1e-15);
        assert!((mm_gap(&p, 0.5) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sampler_is_deterministic() {
        assert_eq!(sample_measure(42, 5).unwrap(), sample_measure(42, 5).unwrap());
        assert_ne!(sample_measure(42, 5).unwrap(), sample_measure(43, 5).unwrap());
        let m = sample_measure(7, 1).unwrap();
        assert_eq!(m.atoms().len(), 1);
        assert_eq!(m.atoms()[0].weight, 1.0);
        assert!(sample_measure(1, 0).is_err());
        assert!(sample_measure(1, 9).is_err());
    }

    #[test]
    fn sampler_invariants() {
        for seed in 0..10_000u64 {
            let m = sample_measure(seed, 1 + (seed % 8) as usize).unwrap();
            assert!((m.total_mass() - 1.0).abs() <= 1e-12);
            for a in m.atoms() {
                assert!(a.weight > 0.0);
                assert!((0.0..TAU).contains(&a.angle));
            }
        }
    }

    #[test]
    fn json_round_trip_and_mass_check() {
        let m = AtomicMeasure::from_json(r#"{"atoms":[{"weight":0.25,"angle":1.0},{"weight":0.75,"angle":7.0}]}"#)
            .unwrap();
        assert!((m.atoms()[1].angle - (7.0 - TAU)).abs() < 1e-15);
        assert_eq!(AtomicMeasure::from_json(&m.to_json()).unwrap(), m);
        assert!(AtomicMeasure::from_json(r#"{"atoms":[{"weight":0.5,"angle":0.0}]}"#).is_err());
        assert!(AtomicMeasure::from_json(r#"{"atoms":[{"weight":1.0,"angle":0.0},{"weight":-0.0,"angle":1.0}]}"#).is_err());
        assert!(AtomicMeasure::from_json(r#"{"atoms":[]}"#).is_err());
    }

    #[test]
    fn rotation_normalization_makes_p1_real() {
        let m = sample_measure(3, 4).unwrap().rotation_normalized();
        let p1 = p_series(&m, 1).coeff(1);
        assert!(p1.im.abs() < 1e-14 && p1.re >= 0.0);
    }
}
