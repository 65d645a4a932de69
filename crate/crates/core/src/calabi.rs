//! Diastasis along the fibre and the coefficient matrix of `exp(D) - 1`
//! at a center `p = (s, 0)`.
//!
//! Writing `xi = s + zeta` and `u = log(1 + zeta/s)/2`, the fibre diastasis is
//! `D = 4 (F(u + ubar) - F(u) - F(ubar) + F(0))` with `F(x) = f(t0 + x)`, so only
//! the `t`-derivatives of `f` at the center enter. They follow from the profile
//! alone, which makes the matrix independent of any momentum table.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{BiJet, Jet};
use crate::momentum::{f_derivatives_at, MomentumTable};
use crate::profile::{phi_jet, phi_k_derivative_closed_form_s, BaseData};
use crate::quadrature::gk21_complex;
use crate::scalar::{DoubleDouble, Scalar};

/// Relative threshold for calling a sign, against the largest entry.
pub const SIGN_TOL: f64 = 1e-9;
/// Largest admissible spread between double and double-double entries.
pub const SPREAD_LIMIT: f64 = 0.1;

// ---------------------------------------------------------------------------
// Fibre diastasis with the analytic continuation of f

struct FibreFunction {
    p: Vec<f64>,
    q: Vec<f64>,
    nq: Vec<f64>,
    ln_k: f64,
    g_mu0: f64,
}

fn cpoly(c: &[f64], x: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

impl FibreFunction {
    fn new(base: &BaseData, mu0: f64) -> Self {
        let mut ff = FibreFunction { p: base.p_poly(), q: base.q_poly(), nq: base.n_poly(), ln_k: 0.0, g_mu0: 0.0 };
        let (r, g) = ff.integrals(Complex64::new(mu0, 0.0));
        ff.ln_k = -2.0 * r.re - mu0.ln();
        ff.g_mu0 = g.re;
        ff
    }

    /// `(R, G)` integrated along the segment `[0, tau]`.
    fn integrals(&self, tau: Complex64) -> (Complex64, Complex64) {
        const PANELS: usize = 24;
        let mut r = Complex64::new(0.0, 0.0);
        let mut g = Complex64::new(0.0, 0.0);
        for i in 0..PANELS {
            let a = i as f64 / PANELS as f64;
            let b = (i + 1) as f64 / PANELS as f64;
            r += gk21_complex(|x| cpoly(&self.nq, tau * x) / (cpoly(&self.p, tau * x) * 2.0), a, b);
            g += gk21_complex(|x| cpoly(&self.q, tau * x) / (cpoly(&self.p, tau * x) * 2.0), a, b);
        }
        (r * tau, g * tau)
    }

    fn ln_w(&self, tau: Complex64) -> Complex64 {
        tau.ln() + self.ln_k + self.integrals(tau).0 * 2.0
    }

    /// Solve `w(tau) = w` by continuation in `arg w` from the real solution.
    fn tau_of_w(&self, w: Complex64, tau_real: f64) -> Result<Complex64> {
        if w.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let theta = w.arg();
        let steps = ((theta.abs() / 0.05).ceil() as usize).max(1);
        let mut tau = Complex64::new(tau_real, 0.0);
        let lnr = w.norm().ln();
        for j in 0..=steps {
            let target = Complex64::new(lnr, theta * j as f64 / steps as f64);
            let mut converged = false;
            for _ in 0..60 {
                let slope = 1.0 / tau + cpoly(&self.nq, tau) / cpoly(&self.p, tau);
                let step = (self.ln_w(tau) - target) / slope;
                tau -= step;
                if step.norm() <= 1e-15 * tau.norm() {
                    converged = true;
                    break;
                }
            }
            if !converged || !tau.re.is_finite() {
                return Err(Error::Domain(format!("no analytic continuation of the fibre potential to w = {w}")));
            }
        }
        Ok(tau)
    }

    fn potential(&self, w: Complex64, tau_real: f64) -> Result<Complex64> {
        let tau = self.tau_of_w(w, tau_real)?;
        Ok(self.integrals(tau).1 - self.g_mu0)
    }
}

/// `D_p(xi) = 4 f(log|xi|^2/2) + 4 f(log s) - 4 f(log(xi s)/2) - 4 f(log(xibar s)/2)`,
/// the holomorphic terms through the continuation of `f` off the real axis.
pub fn diastasis_fibre(table: &MomentumTable, s: f64, xi: Complex64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain("center s must be positive".into()));
    }
    if xi.norm() == 0.0 || (xi.im == 0.0 && xi.re < 0.0) {
        return Err(Error::Domain("xi must be nonzero with |arg xi| < pi".into()));
    }
    let ff = FibreFunction::new(&table.base, table.mu0);
    let at = |w: Complex64| -> Result<Complex64> { ff.potential(w, table.tau_of_w(w.norm())?) };
    let a = at(Complex64::new(xi.norm_sqr(), 0.0))?;
    let b = at(Complex64::new(s * s, 0.0))?;
    let c = at(xi * s)?;
    Ok(4.0 * (a.re + b.re - 2.0 * c.re))
}

// ---------------------------------------------------------------------------
// Coefficient matrix

/// `D` as a bijet in `(zeta, zetabar)` around the center, with momentum `mu0` there.
pub fn diastasis_jet<S: Scalar>(base: &BaseData, mu0: S, order: usize, s: S) -> Result<BiJet<S>> {
    if !(s.to_f64() > 0.0) {
        return Err(Error::Domain("center s must be positive".into()));
    }
    if order == 0 {
        return Err(Error::Contract("matrix order must be at least 1".into()));
    }
    let fj = f_derivatives_at(base, mu0, 2 * order)?;
    let u = Jet::variable(S::zero(), order).scale(S::one() / s).add_scalar(S::one()).ln()?.scale(S::from_f64(0.5));
    let hol = BiJet::holomorphic(&u);
    let anti = BiJet::antiholomorphic(&u);
    let both = BiJet::compose(&fj, &(&hol + &anti))?;
    let fu = Jet::compose(&fj.truncate(order), &u)?;
    let d = &(&both - &BiJet::holomorphic(&fu)) - &BiJet::antiholomorphic(&fu);
    Ok(d.scale(S::from_f64(4.0)))
}

/// Coefficients `b_{jk}` of `exp(D) - 1`.
pub fn exp_diastasis_jet<S: Scalar>(base: &BaseData, mu0: S, order: usize, s: S) -> Result<BiJet<S>> {
    Ok(diastasis_jet(base, mu0, order, s)?.exp().add_scalar(-S::one()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Double,
    Extended,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignCall {
    Positive,
    Negative,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdVerdict {
    PassUpToOrder,
    Fail,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    NegativeDiagonal { index: usize, value: f64 },
    NegativeMinor { size: usize, value: f64 },
    ImpreciseEntry { index: usize, spread: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalabiReport {
    pub center_s: f64,
    pub mu0: f64,
    pub order: usize,
    pub precision: Precision,
    pub bmatrix: Vec<Vec<f64>>,
    pub diag_signs: Vec<SignCall>,
    /// Leading principal minors of the block `1..=order` (row and column 0 vanish).
    pub minors: Vec<f64>,
    pub psd_verdict: PsdVerdict,
    pub witness: Option<Witness>,
    /// Relative gap between double and double-double values of `b_{JJ}`.
    pub spread: f64,
    pub hermitian_defect: f64,
}

fn to_matrix<S: Scalar>(b: &BiJet<S>) -> Vec<Vec<f64>> {
    (0..=b.order()).map(|j| (0..=b.order()).map(|k| b.get(j, k).to_f64()).collect()).collect()
}

fn sign_call(x: f64, tol: f64) -> SignCall {
    if x > tol {
        SignCall::Positive
    } else if x < -tol {
        SignCall::Negative
    } else {
        SignCall::Indeterminate
    }
}

/// Matrix centred at `s = sqrt(mu0)`, which puts the diagonal entries on a common scale.
pub fn calabi_matrix(base: &BaseData, mu0: f64, order: usize, precision: Precision) -> Result<CalabiReport> {
    calabi_matrix_at(base, mu0, order, mu0.sqrt(), precision)
}

pub fn calabi_matrix_at(base: &BaseData, mu0: f64, order: usize, s: f64, precision: Precision) -> Result<CalabiReport> {
    if !(mu0 > 0.0) {
        return Err(Error::Domain("mu0 must be positive".into()));
    }
    let limit = match precision {
        Precision::Double => 4,
        Precision::Extended => 6,
    };
    if order > limit {
        return Err(Error::Contract(format!("order {order} exceeds {limit} at {precision:?} precision")));
    }
    let lo = exp_diastasis_jet(base, mu0, order, s)?;
    let hi = exp_diastasis_jet(base, DoubleDouble::from_f64(mu0), order, DoubleDouble::from_f64(s))?;
    let b_lo = lo.get(order, order);
    let b_hi = hi.get(order, order).to_f64();
    let mut spread = if b_hi == 0.0 { (b_lo - b_hi).abs() } else { ((b_lo - b_hi) / b_hi).abs() };
    let bm = match precision {
        Precision::Double => to_matrix(&lo),
        Precision::Extended => {
            // double-double carries about 53 more bits than the comparison path
            spread *= f64::EPSILON;
            to_matrix(&hi)
        }
    };
    let hermitian_defect = match precision {
        Precision::Double => lo.hermitian_defect(),
        Precision::Extended => hi.hermitian_defect(),
    };
    Ok(diagnose(bm, s, mu0, order, precision, spread, hermitian_defect))
}

fn diagnose(bm: Vec<Vec<f64>>, s: f64, mu0: f64, order: usize, precision: Precision, spread: f64, hermitian_defect: f64) -> CalabiReport {
    let scale = bm.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = SIGN_TOL * scale;
    let mut diag_signs: Vec<SignCall> = (0..=order).map(|j| sign_call(bm[j][j], tol)).collect();
    diag_signs[0] = SignCall::Indeterminate;
    if spread > SPREAD_LIMIT {
        diag_signs[order] = SignCall::Indeterminate;
    }
    let mut minors = Vec::with_capacity(order);
    for size in 1..=order {
        let m = nalgebra::DMatrix::from_fn(size, size, |i, j| bm[i + 1][j + 1]);
        minors.push(m.determinant());
    }
    let mut witness = None;
    if let Some(j) = (1..=order).find(|&j| diag_signs[j] == SignCall::Negative) {
        witness = Some(Witness::NegativeDiagonal { index: j, value: bm[j][j] });
    } else if let Some(i) = (0..order).find(|&i| minors[i] < -SIGN_TOL * scale.powi(i as i32 + 1)) {
        witness = Some(Witness::NegativeMinor { size: i + 1, value: minors[i] });
    }
    let psd_verdict = if witness.is_some() {
        PsdVerdict::Fail
    } else if spread > SPREAD_LIMIT {
        witness = Some(Witness::ImpreciseEntry { index: order, spread });
        PsdVerdict::Indeterminate
    } else {
        PsdVerdict::PassUpToOrder
    };
    CalabiReport { center_s: s, mu0, order, precision, bmatrix: bm, diag_signs, minors, psd_verdict, witness, spread, hermitian_defect }
}

// ---------------------------------------------------------------------------
// Closed forms for the diagonal entries

/// `d^2 dbar^2 (exp(D) - 1)` at the center from the profile:
/// `phi/(4 s^4) (phi phi'' + phi'^2 - 4 phi' + 8 phi + 4)`.
pub fn d4_closed_form<S: Scalar>(base: &BaseData, mu0: S, s: S) -> S {
    let pj = phi_jet(base, mu0, 2);
    let (p0, p1, p2) = (pj.derivative_value(0), pj.derivative_value(1), pj.derivative_value(2));
    let c = |x: f64| S::from_f64(x);
    let s4 = s * s * s * s;
    p0 / (c(4.0) * s4) * (p0 * p2 + p1 * p1 - c(4.0) * p1 + c(8.0) * p0 + c(4.0))
}

/// The same entry from `f'', f''', f''''`: `(f''''/4 - f''' + 2 f''^2 + f'')/s^4`.
pub fn d4_from_f<S: Scalar>(fj: &Jet<S>, s: S) -> S {
    let f = |m| fj.derivative_value(m);
    let c = |x: f64| S::from_f64(x);
    let s4 = s * s * s * s;
    (f(4) / c(4.0) - f(3) + c(2.0) * f(2) * f(2) + f(2)) / s4
}

/// `d^4 dbar^4 (exp(D) - 1)` at the center from `f'', ..., f^(8)`.
pub fn d8_from_f<S: Scalar>(fj: &Jet<S>, s: S) -> Result<S> {
    if fj.order() < 8 {
        return Err(Error::Contract("eighth-order entry needs f derivatives up to order 8".into()));
    }
    let f: Vec<S> = (0..=8).map(|m| fj.derivative_value(m)).collect();
    let c = |x: f64| S::from_f64(x);
    let (f2, f3, f4, f5, f6, f7, f8) = (f[2], f[3], f[4], f[5], f[6], f[7], f[8]);
    let v = c(24.0) * f2 * f2 * f2 * f2 + c(216.0) * f2 * f2 * f2 - c(216.0) * f2 * f2 * f3
        + c(18.0) * f2 * f2 * f4
        + c(242.0) * f2 * f2
        + c(36.0) * f2 * f3 * f3
        - c(396.0) * f2 * f3
        + c(125.0) * f2 * f4
        - c(18.0) * f2 * f5
        + f2 * f6
        + c(36.0) * f2
        + c(114.0) * f3 * f3
        - c(45.0) * f3 * f4
        + c(3.0) * f3 * f5
        - c(66.0) * f3
        + c(17.0 / 8.0) * f4 * f4
        + c(193.0 / 4.0) * f4
        - c(18.0) * f5
        + c(29.0 / 8.0) * f6
        - c(3.0 / 8.0) * f7
        + f8 / c(64.0);
    let s2 = s * s;
    let s8 = s2 * s2 * s2 * s2;
    Ok(v / s8)
}

/// `f', ..., f^(order)` on `O(-k)` built from the closed-form derivatives of
/// `phi_k = (2 tau + tau^2) / (1 + k tau / 2)`.
pub fn f_derivatives_o_minus_k<S: Scalar>(k: u32, mu0: S, order: usize) -> Result<Jet<S>> {
    if order == 0 || order > crate::jets::MAX_ORDER {
        return Err(Error::Contract("derivative order out of range".into()));
    }
    let c = |x: f64| S::from_f64(x);
    let kk = c(k as f64);
    let den = c(1.0) + kk * mu0 / c(2.0);
    let num = c(2.0) * mu0 + mu0 * mu0;
    let mut pc = vec![num / den];
    if order >= 2 {
        pc.push(((c(2.0) + c(2.0) * mu0) * den - num * kk / c(2.0)) / (den * den));
    }
    for j in 2..order {
        pc.push(phi_k_derivative_closed_form_s(k, j as u32, mu0)? / c(crate::jets::factorial(j)));
    }
    let ph = Jet::new(pc)?;
    let mut g = Jet::variable(mu0, order - 1);
    let mut out = vec![S::zero(); order + 1];
    out[1] = mu0;
    for m in 2..=order {
        let d = g.derivative();
        g = &ph.truncate(d.order()) * &d;
        out[m] = g.value() / c(crate::jets::factorial(m));
    }
    Jet::new(out)
}

/// Eighth-order entry on `O(-k)` through the closed-form profile derivatives.
pub fn d8_closed_form<S: Scalar>(k: u32, mu0: S, s: S) -> Result<S> {
    d8_from_f(&f_derivatives_o_minus_k(k, mu0, 8)?, s)
}

// ---------------------------------------------------------------------------
// Obstruction tests

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NecessaryCondition {
    Holds,
    Violated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitProbe {
    pub mu0: f64,
    /// Fourth-derivative entry from the coefficient matrix, `4 b_22`.
    pub d4: f64,
    pub d4_closed_form: f64,
    pub sign: SignCall,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    /// `n (lambda + 2 beta) + 4`.
    pub margin: f64,
    pub verdict: NecessaryCondition,
    pub probes: Vec<LimitProbe>,
    /// Probe signs agree with the limit `2n(lambda + 2beta) + 8` of the bracket over `phi`.
    pub consistent: bool,
}

pub const LIMIT_PROBES: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Necessary condition `n (lambda + 2 beta) >= -4`, cross-checked on the
/// fourth-derivative entry at decreasing `mu0`.
pub fn obstruction_limit_test(base: &BaseData) -> Result<ObstructionReport> {
    let n = base.n as f64;
    let margin = n * (base.lambda + 2.0 * base.beta) + 4.0;
    let verdict = if margin >= 0.0 { NecessaryCondition::Holds } else { NecessaryCondition::Violated };
    let mut probes = Vec::new();
    for &mu0 in &LIMIT_PROBES {
        let rep = calabi_matrix(base, mu0, 2, Precision::Extended)?;
        let d4 = 4.0 * rep.bmatrix[2][2];
        let d4c = d4_closed_form(base, DoubleDouble::from_f64(mu0), DoubleDouble::from_f64(mu0.sqrt())).to_f64();
        probes.push(LimitProbe { mu0, d4, d4_closed_form: d4c, sign: rep.diag_signs[2] });
    }
    let expected = if margin > 0.0 {
        Some(SignCall::Positive)
    } else if margin < 0.0 {
        Some(SignCall::Negative)
    } else {
        None
    };
    let consistent = match expected {
        Some(sg) => probes.iter().all(|p| p.sign == sg),
        None => true,
    };
    Ok(ObstructionReport { margin, verdict, probes, consistent })
}

/// `P_k(0) = 105 - 113 k + 48 k^2 - 8 k^3`.
pub fn pk_at_zero(k: u32) -> i64 {
    let k = k as i64;
    105 - 113 * k + 48 * k * k - 8 * k * k * k
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PkReport {
    pub k: u32,
    pub mu0: f64,
    pub pk_at_zero: i64,
    /// `b_44` from the coefficient matrix (double-double, `s = sqrt(mu0)`).
    pub b44: f64,
    /// `b_44` from the eighth-order closed form.
    pub b44_closed_form: f64,
    pub relative_gap: f64,
    pub b44_sign: SignCall,
    /// `d8 s^8 / (12 mu0^4)`, which tends to `P_k(0)` as `mu0 -> 0`.
    pub limit_estimate: f64,
    pub signs_agree: bool,
}

pub fn pk_polynomial_test(k: u32, mu0_probe: f64) -> Result<PkReport> {
    let base = BaseData::projective_line(k)?;
    let rep = calabi_matrix(&base, mu0_probe, 4, Precision::Extended)?;
    let b44 = rep.bmatrix[4][4];
    let mu = DoubleDouble::from_f64(mu0_probe);
    let s = DoubleDouble::from_f64(mu0_probe.sqrt());
    let d8 = d8_closed_form(k, mu, s)?;
    let b44c = (d8 / DoubleDouble::from_f64(576.0)).to_f64();
    let s8 = (s * s * s * s * s * s * s * s).to_f64();
    let limit_estimate = d8.to_f64() * s8 / (12.0 * mu0_probe.powi(4));
    let pk = pk_at_zero(k);
    let sign = rep.diag_signs[4];
    let signs_agree = match sign {
        SignCall::Positive => pk > 0,
        SignCall::Negative => pk < 0,
        SignCall::Indeterminate => false,
    };
    Ok(PkReport {
        k,
        mu0: mu0_probe,
        pk_at_zero: pk,
        b44,
        b44_closed_form: b44c,
        relative_gap: ((b44 - b44c) / b44c).abs(),
        b44_sign: sign,
        limit_estimate,
        signs_agree,
    })
}
