//! Coefficient functionals and the bound formulas they are compared with.
//!
//! Bounds with `alpha > 0` come from conjectured formulas and are always
//! returned with `conjectural = true`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::extremal::eq_series;
use crate::qcalc::{q_bracket, ClassParams, QLogRatios};
use crate::series::TruncatedSeries;

/// A bound value tagged with whether it is proven or conjectured.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub conjectural: bool,
}

/// Functional value against its stated bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub functional_value: f64,
    pub stated_bound: f64,
    pub slack: f64,
    pub attained: bool,
}

impl BoundComparison {
    pub fn new(functional_value: f64, stated_bound: f64, tol: f64) -> Self {
        let slack = stated_bound - functional_value;
        Self {
            functional_value,
            stated_bound,
            slack,
            attained: slack.abs() <= tol,
        }
    }

    pub fn violated(&self, tol: f64) -> bool {
        self.slack < -tol
    }
}

fn need_order(f: &TruncatedSeries, need: usize) -> Result<()> {
    if f.order() < need {
        Err(Error::OrderTooSmall { have: f.order(), need })
    } else {
        Ok(())
    }
}

/// `|a_3 - mu a_2^2|`.
pub fn fekete_szego_value(f: &TruncatedSeries, mu: Complex64) -> Result<f64> {
    need_order(f, 3)?;
    let a2 = f.coeff(2);
    Ok((f.coeff(3) - mu * a2 * a2).norm())
}

/// The two branches of the Fekete–Szegő bound:
/// `|2 (1 - 2 mu) (L/(q-1))^2 + 2 L/(q^2-1)|` and `2 L/(q^2-1)` with
/// `L = L_alpha`.
pub fn fs_branches(params: &ClassParams, mu: Complex64) -> (f64, f64) {
    let r = params.ratios();
    let l1 = r.lalpha_ratio(params.q, 1);
    let l2 = r.lalpha_ratio(params.q, 2);
    let first = ((-mu * 2.0 + 1.0) * (2.0 * l1 * l1) + 2.0 * l2).norm();
    (first, 2.0 * l2)
}

pub fn fs_bound(params: &ClassParams, mu: Complex64) -> Bound {
    let (a, b) = fs_branches(params, mu);
    Bound {
        value: a.max(b),
        conjectural: params.alpha > 0.0,
    }
}

/// Signed determinant of the `k x k` Hankel matrix `(a_(n+i+j))`.
pub fn hankel_det(f: &TruncatedSeries, k: usize, n: usize) -> Result<Complex64> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidInput("Hankel determinant needs k, n >= 1".into()));
    }
    need_order(f, n + 2 * k - 2)?;
    let mut m: Vec<Vec<Complex64>> = (0..k)
        .map(|i| (0..k).map(|j| f.coeff(n + i + j)).collect())
        .collect();
    Ok(determinant(&mut m))
}

/// `|H_k(n)|`; `H_2(1) = |a_3 - a_2^2|`, `H_2(2) = |a_2 a_4 - a_3^2|`.
pub fn hankel_value(f: &TruncatedSeries, k: usize, n: usize) -> Result<f64> {
    hankel_det(f, k, n).map(|d| d.norm())
}

/// Gaussian elimination with partial pivoting.
fn determinant(m: &mut [Vec<Complex64>]) -> Complex64 {
    let k = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .expect("non-empty range");
        if m[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for row in col + 1..k {
            let factor = m[row][col] / p;
            for c in col..k {
                let v = m[col][c];
                m[row][c] -= factor * v;
            }
        }
    }
    det
}

/// `4 (L_alpha / (q^2 - 1))^2`.
pub fn hankel_bound(params: &ClassParams) -> Bound {
    let l2 = params.ratios().lalpha_ratio(params.q, 2);
    Bound {
        value: 4.0 * l2 * l2,
        conjectural: params.alpha > 0.0,
    }
}

/// `((1 - q)/(1 - q^n)) c_n` for `C_q(alpha)`.
pub fn bieberbach_bound_convex(params: &ClassParams, n: usize) -> Result<f64> {
    Ok(bieberbach_bounds(params, n)?[n])
}

/// Bounds for every `n` up to `n_max`; entries 0 and 1 are 0 and 1.
pub fn bieberbach_bounds(params: &ClassParams, n_max: usize) -> Result<Vec<f64>> {
    if n_max < 2 {
        return Err(Error::InvalidInput(format!("n must be at least 2, got {n_max}")));
    }
    let p = ClassParams {
        order: n_max.max(4),
        ..*params
    };
    let eq = eq_series(&p);
    let mut out: Vec<f64> = (0..=n_max)
        .map(|n| if n < 2 { n as f64 } else { eq.c[n] / q_bracket(n, p.q) })
        .collect();
    out.truncate(n_max + 1);
    Ok(out)
}

/// Scalars from the `|a_2 a_4 - a_3^2|` estimate for `S*_q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct T4Scalars {
    /// Majorant `F(rho)` for fixed `p_1 = c` and `|x| = rho`.
    pub f: f64,
    /// `G(c) = F(1)` in closed form.
    pub g: f64,
    /// `L1^4 - 3 L1 L3 + 3 L2^2`.
    pub a: f64,
}

pub fn t4_scalars(c: f64, rho: f64, q: f64) -> Result<T4Scalars> {
    check_range("c", c, (0.0..=2.0).contains(&c), "[0, 2]")?;
    check_range("rho", rho, (0.0..=1.0).contains(&rho), "[0, 1]")?;
    let r = QLogRatios::new(q, 0.0)?;
    let (l1, l2, l3) = (r.l1, r.l2, r.l3);
    let a = l1.powi(4) - 3.0 * l1 * l3 + 3.0 * l2 * l2;
    let d = 4.0 - c * c;
    let f = c.powi(4) / 12.0 * a.abs()
        + d * c / 2.0 * l1 * l3
        + c * c / 2.0 * d * (l1 * l3 - l2 * l2) * rho
        + d / 4.0 * (d * l2 * l2 + c * (c - 2.0) * l1 * l3) * rho * rho;
    let g = c.powi(4) / 12.0 * (l1.powi(4) - 12.0 * l1 * l3 + 12.0 * l2 * l2)
        + c * c * (3.0 * l1 * l3 - 4.0 * l2 * l2)
        + 4.0 * l2 * l2;
    Ok(T4Scalars { f, g, a })
}
