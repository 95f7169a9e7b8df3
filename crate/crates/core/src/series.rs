//! Truncated complex power series.
//!
//! A [`TruncatedSeries`] of order `N` stores `c_0, ..., c_N` and stands for a
//! power series modulo `z^(N+1)`. Binary operations truncate to the smaller
//! order of the two operands; nothing is ever zero-padded silently.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold below which a constant term is treated as exactly zero (for
/// `exp`) or exactly one (for `log`).
const CONSTANT_TERM_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl TryFrom<Vec<Complex64>> for TruncatedSeries {
    type Error = Error;

    fn try_from(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(coeffs)
    }
}

impl From<TruncatedSeries> for Vec<Complex64> {
    fn from(s: TruncatedSeries) -> Self {
        s.coeffs
    }
}

impl TruncatedSeries {
    /// Builds a series from `c_0..c_N`. Rejects empty or non-finite input.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("a series needs at least c_0".into()));
        }
        if let Some(n) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("coefficient {n} is not finite")));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Internal constructor for coefficient vectors produced by arithmetic.
    pub(crate) fn from_vec(coeffs: Vec<Complex64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::from_vec(vec![Complex64::new(0.0, 0.0); order + 1])
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), order)
    }

    /// `c * z^k` truncated at `order` (zero if `k > order`).
    pub fn monomial(k: usize, c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Builds a series from a coefficient rule `n -> c_n`.
    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self::from_vec((0..=order).map(f).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^n`; zero beyond the order.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Drops coefficients above `order`. Never extends.
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Self::from_vec(self.coeffs[..=n].to_vec())
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::from_vec(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn scale_real(&self, k: f64) -> Self {
        Self::from_vec(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Multiplies by `z`. The order grows by one since the result is known
    /// up to `z^(N+1)`.
    pub fn shift_up(&self) -> Self {
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(Complex64::new(0.0, 0.0));
        v.extend_from_slice(&self.coeffs);
        Self::from_vec(v)
    }

    /// Divides by `z`; requires `c_0 = 0` and order at least 1.
    pub fn shift_down(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::OrderTooSmall { have: 0, need: 1 });
        }
        if self.coeffs[0].norm() > CONSTANT_TERM_EPS {
            return Err(Error::InvalidInput(format!(
                "cannot divide by z: constant term {}",
                self.coeffs[0]
            )));
        }
        Ok(Self::from_vec(self.coeffs[1..].to_vec()))
    }

    /// Largest coefficientwise distance over the common order.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Reciprocal series; `a * a.recip() = 1` to the order of `a`.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0.norm() == 0.0 {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = a0.inv();
        let n = self.order();
        let mut r = vec![Complex64::new(0.0, 0.0); n + 1];
        r[0] = inv0;
        for m in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=m {
                acc += self.coeffs[k] * r[m - k];
            }
            r[m] = -acc * inv0;
        }
        Ok(Self::from_vec(r))
    }

    /// Formal exponential via `n b_n = sum_k k a_k b_(n-k)`.
    pub fn exp(&self) -> Result<Self> {
        if self.coeffs[0].norm() > CONSTANT_TERM_EPS {
            return Err(Error::NonzeroConstantTerm(self.coeffs[0].to_string()));
        }
        let n = self.order();
        let mut b = vec![Complex64::new(0.0, 0.0); n + 1];
        b[0] = Complex64::new(1.0, 0.0);
        for m in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=m {
                acc += self.coeffs[k] * (k as f64) * b[m - k];
            }
            b[m] = acc / (m as f64);
        }
        Ok(Self::from_vec(b))
    }

    /// Formal logarithm of a series with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if (self.coeffs[0] - 1.0).norm() > CONSTANT_TERM_EPS {
            return Err(Error::ConstantTermNotOne(self.coeffs[0].to_string()));
        }
        let n = self.order();
        let mut r = vec![Complex64::new(0.0, 0.0); n + 1];
        for m in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..m {
                acc += r[k] * (k as f64) * self.coeffs[m - k];
            }
            r[m] = self.coeffs[m] - acc / (m as f64);
        }
        Ok(Self::from_vec(r))
    }

    /// Composition with `w z`: `c_n -> c_n w^n`.
    pub fn dilate(&self, w: Complex64) -> Self {
        let mut pow = Complex64::new(1.0, 0.0);
        let v = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * pow;
                pow *= w;
                out
            })
            .collect();
        Self::from_vec(v)
    }

    pub fn dilate_real(&self, w: f64) -> Self {
        self.dilate(Complex64::new(w, 0.0))
    }

    /// Classical derivative, order `N-1`. A constant (order 0) maps to the
    /// zero series of order 0.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_vec(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| c * n as f64)
                .collect(),
        )
    }

    /// Horner evaluation of the truncated polynomial. Outside a disk where
    /// the tail `sum_(n>N) |c_n| |z|^n` is negligible this is only the
    /// polynomial, not the function the series represents.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Crude tail estimate at radius `r`: the largest of the last few terms
    /// `|c_n| r^n` (at most eight, all from the upper half of the
    /// coefficients), summed geometrically.
    pub fn tail_estimate(&self, r: f64) -> f64 {
        let n = self.order();
        let start = n.saturating_sub(7).max(n / 2 + 1);
        let last = (start..=n)
            .map(|k| self.coeffs[k].norm() * r.powi(k as i32))
            .fold(0.0, f64::max);
        if r < 1.0 {
            last / (1.0 - r)
        } else {
            f64::INFINITY
        }
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::from_vec(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::from_vec(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        TruncatedSeries::from_vec(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Cauchy product truncated at the smaller order.
impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: Self) -> TruncatedSeries {
        let n = self.order().min(rhs.order());
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, a) in self.coeffs[..=n].iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in rhs.coeffs[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TruncatedSeries::from_vec(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: &[f64]) -> TruncatedSeries {
        TruncatedSeries::from_real(v).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn mul_difference_of_squares() {
        let p = &re(&[1.0, 1.0, 0.0]) * &re(&[1.0, -1.0, 0.0]);
        assert_eq!(p, re(&[1.0, 0.0, -1.0]));
    }

    #[test]
    fn mul_by_one_is_identity() {
        let a = re(&[0.3, -2.0, 5.0, 1.5]);
        assert_eq!(&a * &TruncatedSeries::one(3), a);
    }

    #[test]
    fn mul_hand_convolution() {
        let p = &re(&[1.0, 2.0, 3.0, 0.0]) * &re(&[1.0, 1.0, 0.0, 0.0]);
        assert_eq!(p, re(&[1.0, 3.0, 5.0, 3.0]));
    }

    #[test]
    fn mul_truncates_to_min_order() {
        let p = &re(&[1.0, 1.0, 1.0, 1.0]) * &re(&[1.0, 1.0]);
        assert_eq!(p.order(), 1);
    }

    #[test]
    fn recip_geometric() {
        let r = re(&[1.0, -1.0, 0.0, 0.0, 0.0, 0.0]).recip().unwrap();
        assert_eq!(r, re(&[1.0; 6]));
        assert_eq!(TruncatedSeries::one(4).recip().unwrap(), TruncatedSeries::one(4));
    }

    #[test]
    fn recip_involution() {
        let a = re(&[2.0, -0.5, 0.25, 3.0, -1.0, 0.7]);
        let back = a.recip().unwrap().recip().unwrap();
        assert!(back.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn recip_zero_constant_term() {
        assert_eq!(re(&[0.0, 1.0]).recip(), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn exp_basics() {
        assert_eq!(TruncatedSeries::zero(5).exp().unwrap(), TruncatedSeries::one(5));
        let e = re(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).exp().unwrap();
        let mut fact = 1.0;
        for n in 0..=6 {
            if n > 0 {
                fact *= n as f64;
            }
            assert!((e.coeff(n) - 1.0 / fact).norm() < 1e-15);
        }
        assert!(matches!(
            re(&[0.5, 1.0]).exp(),
            Err(Error::NonzeroConstantTerm(_))
        ));
    }

    #[test]
    fn exp_second_coefficient_matches_hand_expansion() {
        let (p1, p2) = (Complex64::new(0.7, -0.2), Complex64::new(-1.1, 0.4));
        let mut s = TruncatedSeries::zero(4);
        s.coeffs[1] = p1;
        s.coeffs[2] = p2;
        let e = s.exp().unwrap();
        assert!((e.coeff(2) - (p2 + p1 * p1 / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn log_basics() {
        assert_eq!(TruncatedSeries::one(4).log().unwrap(), TruncatedSeries::zero(4));
        let l = re(&[1.0; 9]).log().unwrap();
        for n in 1..=8 {
            assert!((l.coeff(n) - 1.0 / n as f64).norm() < 1e-15);
        }
        assert!(matches!(re(&[2.0, 1.0]).log(), Err(Error::ConstantTermNotOne(_))));
    }

    #[test]
    fn dilate_rules() {
        let a = re(&[1.0, 2.0, 3.0]);
        assert_eq!(a.dilate(c(1.0)), a);
        let g = re(&[1.0; 5]).dilate_real(0.5);
        for n in 0..5 {
            assert_eq!(g.coeff(n), c(0.5f64.powi(n as i32)));
        }
    }

    #[test]
    fn derivative_rules() {
        assert_eq!(re(&[0.0, 0.0, 1.0]).derivative(), re(&[0.0, 2.0]));
        assert_eq!(re(&[3.0, 0.0, 0.0]).derivative(), re(&[0.0, 0.0]));
        assert_eq!(re(&[3.0]).derivative(), TruncatedSeries::zero(0));
        let e = re(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).exp().unwrap();
        assert!(e.derivative().max_abs_diff(&e.truncate(6)) < 1e-15);
    }

    #[test]
    fn eval_rules() {
        assert_eq!(re(&[1.0, 1.0]).eval(c(0.5)), c(1.5));
        let a = re(&[0.25, -3.0, 2.0]);
        assert_eq!(a.eval(c(0.0)), c(0.25));
        // 1/(1-z) at 1/2 minus the tail 2^-64 rounds to 2 in binary64
        let geo = re(&[1.0; 65]);
        assert!((geo.eval(c(0.5)) - 2.0).norm() <= 1e-15);
    }

    #[test]
    fn new_rejects_non_finite() {
        assert!(TruncatedSeries::new(vec![]).is_err());
        assert!(TruncatedSeries::from_real(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn shift_round_trip() {
        let a = re(&[1.0, 2.0, 3.0]);
        let up = a.shift_up();
        assert_eq!(up.order(), 3);
        assert_eq!(up.shift_down().unwrap(), a);
        assert!(a.shift_down().is_err());
    }
}
