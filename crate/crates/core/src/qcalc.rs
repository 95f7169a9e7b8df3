//! q-calculus: the q-difference operator, the Jackson q-integral and the
//! parameter bundle shared by every class construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::series::TruncatedSeries;

pub const DEFAULT_ORDER: usize = 32;
pub const MAX_ORDER: usize = 256;
pub const DEFAULT_TOL: f64 = 1e-9;

/// `(q, alpha)` together with the working truncation order and tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub q: f64,
    pub alpha: f64,
    pub order: usize,
    pub tol: f64,
}

impl ClassParams {
    pub fn new(q: f64, alpha: f64) -> Result<Self> {
        Self::with_order(q, alpha, DEFAULT_ORDER)
    }

    pub fn with_order(q: f64, alpha: f64, order: usize) -> Result<Self> {
        check_range("q", q, q > 0.0 && q < 1.0, "(0, 1)")?;
        check_range("alpha", alpha, (0.0..1.0).contains(&alpha), "[0, 1)")?;
        if !(4..=MAX_ORDER).contains(&order) {
            return Err(Error::Range {
                name: "order",
                value: order as f64,
                range: "[4, 256]",
            });
        }
        Ok(Self {
            q,
            alpha,
            order,
            tol: DEFAULT_TOL,
        })
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn ratios(&self) -> QLogRatios {
        QLogRatios::from_params(self)
    }
}

/// The constants `ln q / (q^n - 1)` for `n = 1, 2, 3` and
/// `L_alpha = ln(q / (1 - alpha (1 - q)))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QLogRatios {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub lalpha: f64,
}

impl QLogRatios {
    pub fn new(q: f64, alpha: f64) -> Result<Self> {
        check_range("q", q, q > 0.0 && q < 1.0, "(0, 1)")?;
        check_range("alpha", alpha, (0.0..1.0).contains(&alpha), "[0, 1)")?;
        Ok(Self::unchecked(q, alpha))
    }

    fn from_params(p: &ClassParams) -> Self {
        Self::unchecked(p.q, p.alpha)
    }

    fn unchecked(q: f64, alpha: f64) -> Self {
        Self {
            l1: log_ratio(q, 1),
            l2: log_ratio(q, 2),
            l3: log_ratio(q, 3),
            lalpha: lalpha(q, alpha),
        }
    }

    /// `L_alpha / (q^n - 1)`, the general ratio used by the order-alpha formulas.
    pub fn lalpha_ratio(&self, q: f64, n: u32) -> f64 {
        self.lalpha / qpow_minus_one(q, n)
    }
}

/// `q^n - 1` without cancellation for `q` close to 1.
pub fn qpow_minus_one(q: f64, n: u32) -> f64 {
    (n as f64 * q.ln()).exp_m1()
}

/// `ln q / (q^n - 1)`.
pub fn log_ratio(q: f64, n: u32) -> f64 {
    q.ln() / qpow_minus_one(q, n)
}

/// `ln(q / (1 - alpha (1 - q)))`, always negative for `q` in (0, 1).
pub fn lalpha(q: f64, alpha: f64) -> f64 {
    q.ln() - (-alpha * (1.0 - q)).ln_1p()
}

/// The q-bracket `[n]_q = (1 - q^n) / (1 - q)`.
pub fn q_bracket(n: usize, q: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    -qpow_minus_one(q, n as u32) / (1.0 - q)
}

fn check_q(q: f64) -> Result<()> {
    check_range("q", q, q > 0.0 && q < 1.0, "(0, 1)")
}

/// q-difference operator `(f(z) - f(qz)) / (z (1 - q))`, coefficientwise
/// `c_n z^n -> [n]_q c_n z^(n-1)`. Order drops by one.
pub fn dq(a: &TruncatedSeries, q: f64) -> Result<TruncatedSeries> {
    check_q(q)?;
    if a.order() == 0 {
        return Ok(TruncatedSeries::zero(0));
    }
    Ok(TruncatedSeries::from_fn(a.order() - 1, |n| {
        a.coeff(n + 1) * q_bracket(n + 1, q)
    }))
}

/// Jackson q-integral from 0, `c_n z^n -> c_n z^(n+1) / [n+1]_q`. Order
/// grows by one so that `iq(dq(f)) = f - f(0)` holds with no truncation loss.
pub fn iq(a: &TruncatedSeries, q: f64) -> Result<TruncatedSeries> {
    check_q(q)?;
    Ok(TruncatedSeries::from_fn(a.order() + 1, |n| {
        if n == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            a.coeff(n - 1) / q_bracket(n, q)
        }
    }))
}

/// Iteration cap for [`jackson_sum`].
pub const JACKSON_MAX_TERMS: usize = 100_000;

/// Direct Jackson sum `x (1 - q) sum_n q^n f(x q^n)`.
///
/// `bound` is an upper bound for `|f|` on `[0, x]`; the sum stops once
/// `q^n * bound` drops below `tail_tol`. Fails with `NonConvergence` if that
/// never happens within [`JACKSON_MAX_TERMS`] terms or a term is not finite.
pub fn jackson_sum<F>(f: F, x: f64, q: f64, bound: f64, tail_tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    check_q(q)?;
    check_range("tail_tol", tail_tol, tail_tol > 0.0, "(0, inf)")?;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut qn = 1.0;
    for n in 0..JACKSON_MAX_TERMS {
        let term = f(x * qn) * qn;
        if !term.is_finite() {
            return Err(Error::NonConvergence { iterations: n });
        }
        sum += term;
        qn *= q;
        if qn * bound.abs() < tail_tol {
            return Ok(sum * x * (1.0 - q));
        }
    }
    Err(Error::NonConvergence {
        iterations: JACKSON_MAX_TERMS,
    })
}
