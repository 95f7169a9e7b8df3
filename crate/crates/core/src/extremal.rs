//! Closed-form representing and extremal functions.
//!
//! All of them are exponentials of the series
//! `F_(q,alpha)(z) = sum_n 2 L_alpha / (q^n - 1) z^n`, which reduces to
//! `F_q` at `alpha = 0`.

use num_complex::Complex64;

use crate::caratheodory::AtomicMeasure;
use crate::error::{Error, Result};
use crate::qcalc::{iq, q_bracket, ClassParams};
use crate::series::TruncatedSeries;

fn exponent_coeff(params: &ClassParams, n: usize) -> f64 {
    params.ratios().lalpha_ratio(params.q, n as u32) * 2.0
}

/// `F_(q,alpha)` to `params.order`; zero constant term.
pub fn f_exponent_series(params: &ClassParams) -> TruncatedSeries {
    TruncatedSeries::from_fn(params.order, |n| {
        if n == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(exponent_coeff(params, n), 0.0)
        }
    })
}

/// `z exp(F)` for an exponent of order `N - 1`, giving order `N`.
fn z_exp(exponent: &TruncatedSeries) -> TruncatedSeries {
    exponent
        .exp()
        .expect("exponent has zero constant term")
        .shift_up()
}

/// `F_1(z) = z exp(F_(q,alpha)(z))`.
pub fn f1_series(params: &ClassParams) -> TruncatedSeries {
    let exponent = f_exponent_series(params).truncate(params.order - 1);
    z_exp(&exponent)
}

/// `F_2(z) = z exp(sum_m 2 L_alpha / (q^(2m) - 1) z^(2m))`: the exponent
/// keeps only the even-degree terms of `F_(q,alpha)`.
pub fn f2_series(params: &ClassParams) -> TruncatedSeries {
    let full = f_exponent_series(params).truncate(params.order - 1);
    let exponent = TruncatedSeries::from_fn(full.order(), |n| {
        if n % 2 == 0 {
            full.coeff(n)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    z_exp(&exponent)
}

/// `E_q = I_q exp(F_(q,alpha))` together with the coefficients `c_n` of
/// `z exp(F_(q,alpha))`.
#[derive(Clone, Debug, PartialEq)]
pub struct EqResult {
    pub e_q: TruncatedSeries,
    /// `c[n]` is the coefficient of `z^n`; `c[0] = 0`, `c[1] = 1`.
    pub c: Vec<f64>,
}

impl EqResult {
    /// `b_n`, the coefficient of `z^n` in `E_q`.
    pub fn b(&self, n: usize) -> f64 {
        self.e_q.coeff(n).re
    }

    /// `((1 - q) / (1 - q^n)) c_n`, the bound in closed form.
    pub fn bound(&self, q: f64, n: usize) -> f64 {
        self.c[n] / q_bracket(n, q)
    }
}

pub fn eq_series(params: &ClassParams) -> EqResult {
    let exponent = f_exponent_series(params).truncate(params.order - 1);
    let exp_f = exponent.exp().expect("zero constant term");
    let c = exp_f.shift_up().coeffs().iter().map(|c| c.re).collect();
    let e_q = iq(&exp_f, params.q).expect("q validated by ClassParams");
    EqResult { e_q, c }
}

/// `f(z) = z exp(sum_j t_j F_q(sigma_j z))`, the q-starlike member attached
/// to an atomic measure. Only defined for `alpha = 0`.
pub fn herglotz_starlike(m: &AtomicMeasure, params: &ClassParams) -> Result<TruncatedSeries> {
    if params.alpha != 0.0 {
        return Err(Error::AlphaUnsupported(params.alpha));
    }
    Ok(z_exp(&measure_exponent(m, params)))
}

/// `sum_j t_j F_(q,alpha)(sigma_j z)` truncated at order `N - 1`.
pub(crate) fn measure_exponent(m: &AtomicMeasure, params: &ClassParams) -> TruncatedSeries {
    let f = f_exponent_series(params).truncate(params.order - 1);
    let mut acc = TruncatedSeries::zero(f.order());
    for atom in m.atoms() {
        acc = &acc + &f.dilate(atom.location()).scale_real(atom.weight);
    }
    acc
}
