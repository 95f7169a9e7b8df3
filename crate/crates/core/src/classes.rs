//! Members of the q-starlike class `S*_q(alpha)` and the q-convex class
//! `C_q(alpha)`: constructions from Carathéodory data and grid certificates.
//!
//! Both membership criteria are statements about a quotient that is bounded
//! by one on the disk for class members:
//!
//! * starlike: `g(z) = f(qz) / f(z)` with `|g - alpha q| <= 1 - alpha`,
//! * convex: `R(z) = q (D_q f)(qz) / (D_q f)(z)` with `|R - alpha q| <= 1 - alpha`.
//!
//! The starlike generator solves `f(qz) = f(z) G(z)` for
//! `G = (1 - alpha) exp((ln q) p) + alpha q`, which is the definition of
//! `S*_q(alpha)` rewritten in terms of `g`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::caratheodory::AtomicMeasure;
use crate::error::{Error, Result};
use crate::extremal::measure_exponent;
use crate::qcalc::{dq, iq, qpow_minus_one, ClassParams};
use crate::series::TruncatedSeries;

/// Truncation order used when a member has to be certified on the default
/// grid; at `r = 0.9` the a-priori truncation bound is below `1e-9`.
pub const CERT_ORDER: usize = 224;

/// Default tolerance of membership certificates.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

/// Default truncation tolerance of the infinite product in [`convex_from_h`].
pub const PROD_TOL: f64 = 1e-17;

const SINGULAR_EPS: f64 = 1e-14;

fn check_normalized(f: &TruncatedSeries) -> Result<()> {
    if f.order() < 2 {
        return Err(Error::OrderTooSmall { have: f.order(), need: 2 });
    }
    if f.coeff(0).norm() > 1e-12 || (f.coeff(1) - 1.0).norm() > 1e-12 {
        return Err(Error::InvalidInput(
            "expected a normalized series f(0) = 0, f'(0) = 1".into(),
        ));
    }
    Ok(())
}

fn check_p(p: &TruncatedSeries) -> Result<()> {
    if (p.coeff(0) - 1.0).norm() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "Carathéodory series needs p_0 = 1, got {}",
            p.coeff(0)
        )));
    }
    Ok(())
}

/// `exp((ln q) p)` as `q exp((ln q)(p - 1))`.
fn bq_from_p(p: &TruncatedSeries, q: f64) -> TruncatedSeries {
    let shifted = &p.scale_real(q.ln()) - &TruncatedSeries::constant(q.ln().into(), p.order());
    shifted.exp().expect("zero constant term").scale_real(q)
}

/// Member of `S*_q(alpha)` attached to `p`, of order `min(p.order, params.order)`.
///
/// With `G = (1 - alpha) exp((ln q) p) + alpha q` the coefficients follow
/// from `f(qz) = f(z) G(z)`:
/// `a_1 = 1`, `a_n = (sum_(k<n) a_k G_(n-k)) / (q^n - q)`.
pub fn starlike_from_p(p: &TruncatedSeries, params: &ClassParams) -> Result<TruncatedSeries> {
    check_p(p)?;
    let order = p.order().min(params.order);
    let q = params.q;
    let alpha = params.alpha;
    let mut g = bq_from_p(&p.truncate(order), q).scale_real(1.0 - alpha);
    g = &g + &TruncatedSeries::constant((alpha * q).into(), order);
    let mut a = vec![Complex64::new(0.0, 0.0); order + 1];
    if order >= 1 {
        a[1] = Complex64::new(1.0, 0.0);
    }
    for n in 2..=order {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..n {
            acc += a[k] * g.coeff(n - k);
        }
        // q^n - q = q (q^(n-1) - 1)
        a[n] = acc / (q * qpow_minus_one(q, (n - 1) as u32));
    }
    Ok(TruncatedSeries::from_vec(a))
}

/// Member of `C_q(alpha)` from `h = exp((ln q) p)` through the product
/// `z (D_q f)(z) = z / prod_(n=0..n_max) Phi(z q^n)`,
/// `Phi = ((1 - alpha) h + alpha q) / q`, with
/// `n_max = ceil(ln(prod_tol) / ln q)`.
///
/// The truncated product is evaluated through its formal logarithm: with
/// `L = log Phi`, the log of the product has coefficients
/// `L_k (1 - q^(k (n_max + 1))) / (1 - q^k)`.
pub fn convex_from_h(
    p: &TruncatedSeries,
    params: &ClassParams,
    prod_tol: f64,
) -> Result<TruncatedSeries> {
    check_p(p)?;
    if !(prod_tol > 0.0 && prod_tol < 1.0) {
        return Err(Error::Range {
            name: "prod_tol",
            value: prod_tol,
            range: "(0, 1)",
        });
    }
    let q = params.q;
    let alpha = params.alpha;
    let order = p.order().min(params.order);
    if order < 2 {
        return Err(Error::OrderTooSmall { have: order, need: 2 });
    }
    let n_max = (prod_tol.ln() / q.ln()).ceil() as u32;
    let h = bq_from_p(&p.truncate(order - 1), q);
    let phi = &h.scale_real((1.0 - alpha) / q)
        + &TruncatedSeries::constant(alpha.into(), order - 1);
    let log_phi = phi.log()?;
    let log_prod = TruncatedSeries::from_fn(order - 1, |k| {
        if k == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let k = k as u32;
        let partial = qpow_minus_one(q, k * (n_max + 1)) / qpow_minus_one(q, k);
        log_phi.coeff(k as usize) * partial
    });
    let dqf = (-&log_prod).exp()?;
    iq(&dqf, q)
}

/// Member of `C_q(alpha)` with `z (D_q f)(z) = z exp(sum_j t_j F_(q,alpha)(sigma_j z))`.
pub fn convex_from_measure(m: &AtomicMeasure, params: &ClassParams) -> Result<TruncatedSeries> {
    let dqf = measure_exponent(m, params).exp()?;
    iq(&dqf, params.q)
}

/// `q (D_q f)(qz) / (D_q f)(z)` as a series of order `N - 1`.
fn convex_quotient(f: &TruncatedSeries, q: f64) -> Result<TruncatedSeries> {
    let d = dq(f, q)?;
    Ok(&d.dilate_real(q) * &d.recip()?.scale_real(q))
}

/// `f(qz) / f(z)` as a series of order `N - 1`.
fn starlike_quotient(f: &TruncatedSeries, q: f64) -> Result<TruncatedSeries> {
    let u = f.shift_down()?;
    Ok(&u.dilate_real(q) * &u.recip()?.scale_real(q))
}

/// `rho(f) = (q (D_q f)(qz) / (D_q f)(z) - alpha q) / (1 - alpha)`, a
/// series with constant term `q` and order `N - 1`.
pub fn rho_map(f: &TruncatedSeries, params: &ClassParams) -> Result<TruncatedSeries> {
    check_normalized(f)?;
    let r = convex_quotient(f, params.q)?;
    let shifted = &r - &TruncatedSeries::constant((params.alpha * params.q).into(), r.order());
    Ok(shifted.scale_real(1.0 / (1.0 - params.alpha)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `f -> g = z (D_q f)(z)`
    ToStarlike,
    /// `g -> f = I_q(g(z) / z)`
    ToConvex,
}

/// The q-Alexander correspondence between `C_q(alpha)` and `S*_q(alpha)`.
pub fn alexander_pair(
    f: &TruncatedSeries,
    direction: Direction,
    params: &ClassParams,
) -> Result<TruncatedSeries> {
    check_normalized(f)?;
    match direction {
        Direction::ToStarlike => Ok(dq(f, params.q)?.shift_up()),
        Direction::ToConvex => iq(&f.shift_down()?, params.q),
    }
}

/// Sample grid: every radius times `angles` equally spaced angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for Grid {
    /// `r = 0.05, 0.10, ..., 0.90` and 256 angles.
    fn default() -> Self {
        Self {
            radii: (1..=18).map(|k| k as f64 * 0.05).collect(),
            angles: 256,
        }
    }
}

impl Grid {
    fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.radii.iter().flat_map(move |&r| {
            (0..self.angles).map(move |j| Complex64::from_polar(r, TAU * j as f64 / self.angles as f64))
        })
    }

    fn r_max(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.angles == 0 {
            return Err(Error::InvalidInput("empty grid".into()));
        }
        if self.radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
            return Err(Error::InvalidInput("grid radii must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// How the quotient was evaluated on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalRoute {
    /// Horner evaluation of `f` (or `D_q f`) at `z` and `qz`.
    Direct,
    /// Horner evaluation of the quotient series itself.
    Quotient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    /// `worst_margin + error_estimate <= tol`, and no zeros inside: either
    /// `zeros_inside == Some(0)`, or the count is unreliable and
    /// `log_radius` exceeds the largest grid radius.
    pub passed: bool,
    /// Largest value of `|expr - center| - radius` over the grid.
    pub worst_margin: f64,
    pub worst_point: Complex64,
    /// Truncation plus rounding estimate for `worst_margin`.
    pub error_estimate: f64,
    /// Zeros inside the outer grid circle of the function the route divides
    /// by (the quotient itself, or `f(z)/z` resp. `D_q f`). A zero means `f`
    /// is not analytic and zero-free there. `None` when the count is not
    /// reliable at the estimated error.
    pub zeros_inside: Option<i64>,
    /// Root-test estimate of the radius of convergence of the logarithm of
    /// that function, used when `zeros_inside` is `None`.
    pub log_radius: f64,
    pub route: EvalRoute,
    pub tol: f64,
    pub grid: Grid,
}

/// Which criterion a certificate checks; both reduce to a disk condition on
/// a quotient `w(z)`.
#[derive(Clone, Copy)]
enum Criterion {
    Starlike,
    Convex,
}

struct RouteOutcome {
    margin: f64,
    point: Complex64,
    error: f64,
}

/// Winding number of `w` along `|z| = r` and the smallest `|w|` seen.
///
/// Each of the initial arcs is bisected until the argument changes by less
/// than a quarter radian per step (at most 16 levels deep).
fn winding(w: impl Fn(Complex64) -> Complex64, r: f64) -> (i64, f64) {
    const ARCS: usize = 1024;
    const MAX_STEP: f64 = 0.25;
    let at = |t: f64| w(Complex64::from_polar(r, t));
    let mut min_abs = f64::INFINITY;
    let mut total = 0.0;
    let mut stack = Vec::new();
    for k in 0..ARCS {
        let (a, b) = (TAU * k as f64 / ARCS as f64, TAU * (k + 1) as f64 / ARCS as f64);
        stack.push((a, b, at(a), at(b), 0u32));
        while let Some((a, b, wa, wb, depth)) = stack.pop() {
            min_abs = min_abs.min(wa.norm()).min(wb.norm());
            let step = (wb / wa).arg();
            if step.abs() < MAX_STEP || depth >= 16 || !step.is_finite() {
                total += step;
            } else {
                let m = 0.5 * (a + b);
                let wm = at(m);
                // second half first so the first half is processed first
                stack.push((m, b, wm, wb, depth + 1));
                stack.push((a, m, wa, wm, depth + 1));
            }
        }
    }
    if !total.is_finite() {
        return (i64::MAX, min_abs);
    }
    ((total / TAU).round() as i64, min_abs)
}

/// `1 / max |c_n|^(1/n)` over the upper half of the coefficients.
fn root_test_radius(s: &TruncatedSeries) -> f64 {
    let n = s.order();
    let m = (n / 2 + 1..=n)
        .map(|k| s.coeff(k).norm().powf(1.0 / k as f64))
        .fold(0.0, f64::max);
    1.0 / m
}

fn certify(
    f: &TruncatedSeries,
    params: &ClassParams,
    grid: &Grid,
    criterion: Criterion,
) -> Result<CertReport> {
    check_normalized(f)?;
    grid.validate()?;
    let q = params.q;
    let alpha = params.alpha;
    // the series whose ratio at qz and z is the quotient
    let base = match criterion {
        Criterion::Starlike => f.shift_down()?,
        Criterion::Convex => dq(f, q)?,
    };
    let prefactor = q;
    let quotient = match criterion {
        Criterion::Starlike => starlike_quotient(f, q)?,
        Criterion::Convex => convex_quotient(f, q)?,
    };
    // second algebraic route for the same series: q exp(psi(qz) - psi(z)), psi = log(base)
    let log_base = base.log()?;
    let via_log = (&log_base.dilate_real(q) - &log_base)
        .exp()?
        .scale_real(prefactor);

    // margin as a function of the quotient value w
    let (scale, margin_of) = margin_fn(criterion, q, alpha);
    let r_max = grid.r_max();

    // direct route
    let mut direct = RouteOutcome {
        margin: f64::NEG_INFINITY,
        point: Complex64::new(0.0, 0.0),
        error: 0.0,
    };
    let mut min_base = f64::INFINITY;
    let mut max_w = 0.0f64;
    // quotient route
    let mut quot = RouteOutcome {
        margin: f64::NEG_INFINITY,
        point: Complex64::new(0.0, 0.0),
        error: 0.0,
    };

    for z in grid.points() {
        let fz = f.eval(z);
        if fz.norm() < SINGULAR_EPS {
            return Err(Error::EvaluationSingularity { re: z.re, im: z.im });
        }
        let bz = base.eval(z);
        min_base = min_base.min(bz.norm());
        let w_direct = base.eval(z * q) * prefactor / bz;
        let w_quot = quotient.eval(z);
        max_w = max_w.max(w_direct.norm());
        let m_direct = margin_of(w_direct);
        let m_quot = margin_of(w_quot);
        // strict comparison keeps the lexicographically first (r, angle)
        if m_direct > direct.margin || direct.margin.is_nan() {
            direct.margin = m_direct;
            direct.point = z;
        }
        if m_quot > quot.margin || quot.margin.is_nan() {
            quot.margin = m_quot;
            quot.point = z;
        }
    }

    let weights_sum = |s: &TruncatedSeries| -> f64 {
        s.coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| c.norm() * r_max.powi(n as i32))
            .sum()
    };
    let eps = f64::EPSILON;
    direct.error = {
        let rounding = 8.0 * eps * base.order().max(1) as f64 * weights_sum(&base);
        let trunc = base.tail_estimate(r_max);
        scale * (1.0 + max_w) * (trunc + rounding) / min_base
    };
    quot.error = {
        let n = quotient.order();
        let route_gap: f64 = quotient
            .coeffs()
            .iter()
            .zip(via_log.coeffs())
            .enumerate()
            .map(|(k, (a, b))| (a - b).norm() * r_max.powi(k as i32))
            .sum();
        // bounded-by-one coefficients for members, largest recent value otherwise
        let tail_coeff = quotient.coeffs()[n.saturating_sub(7)..]
            .iter()
            .map(|c| c.norm())
            .fold(1.0, f64::max);
        let trunc = tail_coeff * r_max.powi(n as i32 + 1) / (1.0 - r_max);
        scale * (trunc + 2.0 * route_gap)
    };

    let pick_direct = direct.error.is_finite() && !(quot.error < direct.error);
    // Rouché: the count is trusted when the function stays further from zero
    // than its error on the circle
    let (route, chosen, zeros_inside) = if pick_direct {
        let (n, min_abs) = winding(|z| base.eval(z), r_max);
        let err = base.tail_estimate(r_max) + 8.0 * eps * base.order().max(1) as f64 * weights_sum(&base);
        (EvalRoute::Direct, direct, (min_abs > err).then_some(n))
    } else {
        let (n, min_abs) = winding(|z| quotient.eval(z), r_max);
        let err = quot.error / scale;
        (EvalRoute::Quotient, quot, (min_abs > err).then_some(n))
    };
    let log_radius = root_test_radius(&log_base);
    let zero_free = match zeros_inside {
        Some(n) => n == 0,
        None => log_radius > r_max,
    };
    if !chosen.margin.is_finite() {
        return Err(Error::EvaluationSingularity {
            re: chosen.point.re,
            im: chosen.point.im,
        });
    }
    Ok(CertReport {
        passed: chosen.margin + chosen.error <= params.tol && zero_free,
        worst_margin: chosen.margin,
        worst_point: chosen.point,
        error_estimate: chosen.error,
        zeros_inside,
        log_radius,
        route,
        tol: params.tol,
        grid: grid.clone(),
    })
}

/// Returns the factor converting quotient errors into margin errors and the
/// margin as a function of the quotient value.
fn margin_fn(criterion: Criterion, q: f64, alpha: f64) -> (f64, impl Fn(Complex64) -> f64) {
    let radius_s = 1.0 / (1.0 - q);
    let scale = match criterion {
        Criterion::Starlike => 1.0 / ((1.0 - alpha) * (1.0 - q)),
        Criterion::Convex => 1.0,
    };
    let f = move |w: Complex64| match criterion {
        // |((z D_q f / f) - alpha) / (1 - alpha) - 1/(1-q)| - 1/(1-q), with z D_q f / f = (1 - w)/(1 - q)
        Criterion::Starlike => {
            let expr = ((-w + 1.0) / (1.0 - q) - alpha) / (1.0 - alpha);
            (expr - radius_s).norm() - radius_s
        }
        Criterion::Convex => (w - alpha * q).norm() - (1.0 - alpha),
    };
    (scale, f)
}

/// Grid certificate for `S*_q(alpha)`.
pub fn membership_starlike(
    f: &TruncatedSeries,
    params: &ClassParams,
    grid: &Grid,
) -> Result<CertReport> {
    certify(f, params, grid, Criterion::Starlike)
}

/// Grid certificate for `C_q(alpha)` through `|q (D_q f)(qz)/(D_q f)(z) - alpha q| <= 1 - alpha`.
pub fn membership_convex(
    f: &TruncatedSeries,
    params: &ClassParams,
    grid: &Grid,
) -> Result<CertReport> {
    certify(f, params, grid, Criterion::Convex)
}
