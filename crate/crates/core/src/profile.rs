//! The profile function `phi(tau)` of the momentum construction over a
//! Kähler–Einstein base with `rho_M = lambda omega_M` and bundle curvature
//! `beta omega_M`.
//!
//! The closed form is
//! `phi = 2 / Q * (tau + lambda ((1 - beta tau)^{n+1} - (1 - beta tau) + beta n tau) / (beta^2 (n + 1)))`
//! with `Q = (1 - beta tau)^n`. Expanding the binomial gives `phi = 2 tau P(tau) / Q(tau)`
//! with a polynomial `P` whose coefficients are all nonnegative, so `P >= 1` on
//! `tau >= 0`. Evaluation uses the expanded form, which has no cancellation
//! near `tau = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::{Jet, MAX_ORDER};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseData {
    pub n: u32,
    pub lambda: f64,
    pub beta: f64,
}

/// The two concrete geometric families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `C^n` with the flat metric, `h = exp(-beta |z|^2 / 2)`.
    Flat { n: u32, beta: f64 },
    /// `O(-k)` over `CP^1` with `Phi = 4 log(1 + |z|^2 / 4)`, `h = (1 + |z|^2/4)^k`.
    OMinusK { k: u32 },
}

impl Family {
    pub fn base(&self) -> BaseData {
        match *self {
            Family::Flat { n, beta } => BaseData { n, lambda: 0.0, beta },
            Family::OMinusK { k } => BaseData { n: 1, lambda: 1.0, beta: -(k as f64) / 2.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::Flat { n, beta } => BaseData::new(n, 0.0, beta).map(|_| ()),
            Family::OMinusK { k } if k >= 1 => Ok(()),
            Family::OMinusK { .. } => Err(Error::Domain("k must be a positive integer".into())),
        }
    }

    /// Complex dimension of the total space.
    pub fn dim(&self) -> usize {
        self.base().n as usize + 1
    }

    pub fn label(&self) -> String {
        match *self {
            Family::Flat { n, beta } => format!("flat(n={n}, beta={beta})"),
            Family::OMinusK { k } => format!("O(-{k})"),
        }
    }
}

impl BaseData {
    pub fn new(n: u32, lambda: f64, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("base dimension n must be at least 1".into()));
        }
        if !(beta < 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("beta must be negative, got {beta}")));
        }
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda must be nonnegative, got {lambda}")));
        }
        Ok(BaseData { n, lambda, beta })
    }

    pub fn flat(n: u32, beta: f64) -> Result<Self> {
        Self::new(n, 0.0, beta)
    }

    pub fn projective_line(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("k must be a positive integer".into()));
        }
        Self::new(1, 1.0, -(k as f64) / 2.0)
    }

    /// Coefficients of `Q(tau) = (1 - beta tau)^n`.
    pub fn q_poly(&self) -> Vec<f64> {
        let n = self.n as usize;
        (0..=n).map(|j| binom(n, j) * (-self.beta).powi(j as i32)).collect()
    }

    /// Coefficients of `P(tau)` in `phi = 2 tau P / Q`.
    pub fn p_poly(&self) -> Vec<f64> {
        let n = self.n as usize;
        let mut p = vec![0.0; n + 1];
        p[0] = 1.0;
        let scale = self.lambda / (self.beta * self.beta * (n as f64 + 1.0));
        for j in 2..=n + 1 {
            p[j - 1] += scale * binom(n + 1, j) * (-self.beta).powi(j as i32);
        }
        p
    }

    /// Coefficients of `N(tau) = (Q - P) / tau`, so that `1/phi - 1/(2 tau) = N / (2 P)`.
    pub fn n_poly(&self) -> Vec<f64> {
        let q = self.q_poly();
        let p = self.p_poly();
        (1..q.len().max(p.len()))
            .map(|j| q.get(j).copied().unwrap_or(0.0) - p.get(j).copied().unwrap_or(0.0))
            .collect()
    }
}

pub(crate) fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

pub(crate) fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

pub(crate) fn poly_jet<S: Scalar>(c: &[f64], x: &Jet<S>) -> Jet<S> {
    let mut acc = Jet::constant(S::zero(), x.order());
    for &a in c.iter().rev() {
        acc = (&acc * x).add_scalar(S::from_f64(a));
    }
    acc
}

/// Jet of `phi` at `tau` (no domain checks).
pub fn phi_jet<S: Scalar>(base: &BaseData, tau: S, order: usize) -> Jet<S> {
    let t = Jet::variable(tau, order);
    let p = poly_jet(&base.p_poly(), &t);
    let q = poly_jet(&base.q_poly(), &t);
    (&t * &p).scale(S::from_f64(2.0)).div_jet(&q).expect("Q >= 1 on the momentum interval")
}

/// Jet of `Q(tau)`.
pub fn q_jet<S: Scalar>(base: &BaseData, tau: S, order: usize) -> Jet<S> {
    poly_jet(&base.q_poly(), &Jet::variable(tau, order))
}

pub fn phi(base: &BaseData, tau: f64) -> f64 {
    2.0 * tau * poly_eval(&base.p_poly(), tau) / poly_eval(&base.q_poly(), tau)
}

pub fn q_value(base: &BaseData, tau: f64) -> f64 {
    (1.0 - base.beta * tau).powi(base.n as i32)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileJet {
    pub tau: f64,
    pub values: Jet,
    pub q_values: Jet,
}

pub fn phi_eval(base: &BaseData, tau: f64, order: usize) -> Result<ProfileJet> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau must be a finite nonnegative number, got {tau}")));
    }
    if order > MAX_ORDER {
        return Err(Error::Contract(format!("order {order} exceeds {MAX_ORDER}")));
    }
    let values = phi_jet(base, tau, order);
    let q_values = q_jet(base, tau, order);
    if !values.is_finite() || !q_values.is_finite() {
        return Err(Error::Domain(format!("profile overflow at tau = {tau}")));
    }
    Ok(ProfileJet { tau, values, q_values })
}

/// `phi_k^{(j)}(tau) = (-1)^{j+1} 8 j! (k-1) k^{j-2} / (2 + k tau)^{j+1}` for `j >= 2`.
pub fn phi_k_derivative_closed_form(k: u32, j: u32, tau: f64) -> Result<f64> {
    phi_k_derivative_closed_form_s(k, j, tau)
}

pub fn phi_k_derivative_closed_form_s<S: Scalar>(k: u32, j: u32, tau: S) -> Result<S> {
    if k == 0 {
        return Err(Error::Domain("k must be a positive integer".into()));
    }
    if j < 2 {
        return Err(Error::Domain("closed form holds for derivative order j >= 2".into()));
    }
    if tau.to_f64() < 0.0 {
        return Err(Error::Domain("tau must be nonnegative".into()));
    }
    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
    let num = sign * 8.0 * crate::jets::factorial(j as usize) * (k as f64 - 1.0) * (k as f64).powi(j as i32 - 2);
    let mut den = S::one();
    let base = S::from_f64(2.0) + S::from_f64(k as f64) * tau;
    for _ in 0..=j {
        den *= base;
    }
    Ok(S::from_f64(num) / den)
}

/// The displayed closed forms for `phi'(mu0)` and `phi''(mu0)`.
pub fn condnec_phi_derivatives(base: &BaseData, mu0: f64) -> Result<(f64, f64)> {
    if !(mu0 > 0.0) {
        return Err(Error::Domain("mu0 must be positive".into()));
    }
    let (n, l, b) = (base.n as f64, base.lambda, base.beta);
    let qn = (1.0 - b * mu0).powi(base.n as i32);
    let phi1 = 2.0 * ((n + 1.0) * b + l * (1.0 - qn) + ((b * b + 1.0) * (n * n - 1.0) + l * qn) * mu0)
        / ((n + 1.0) * b * (1.0 - b * mu0).powi(base.n as i32 + 1));
    let phi2 = 2.0 * n / (1.0 - b * mu0).powi(base.n as i32 + 2) * (l + 2.0 * b + (n - 1.0) * b * (b + l) * mu0);
    Ok((phi1, phi2))
}

/// Coefficients of the Ricci form: `lambda + beta (phi Q)' / (2Q)` on the base
/// and `-[(phi Q)'/Q]' / (2 phi)` on the fibre.
pub fn ricci_form_components(base: &BaseData, tau: f64) -> Result<(f64, f64)> {
    if !(tau > 0.0) {
        return Err(Error::Domain("fibre Ricci coefficient needs tau > 0 (phi(0) = 0)".into()));
    }
    let ph = phi_jet(base, tau, 2);
    let q = q_jet(base, tau, 2);
    let ratio = (&ph * &q).derivative().div_jet(&q.truncate(1))?;
    let base_coeff = base.lambda + base.beta / 2.0 * ratio.value();
    let fibre_coeff = -ratio.derivative_value(1) / (2.0 * ph.value());
    Ok((base_coeff, fibre_coeff))
}

/// Printed form of `(phi Q)'/Q`.
pub fn mm_ratio_formula(base: &BaseData, tau: f64) -> f64 {
    let (l, b) = (base.lambda, base.beta);
    let qn = (1.0 - b * tau).powi(base.n as i32);
    2.0 * l / (b * qn) - 2.0 * l / b + 2.0 / qn
}

/// Printed form of `((phi Q)'/Q)'`.
pub fn mm_ratio_derivative_formula(base: &BaseData, tau: f64) -> f64 {
    2.0 * base.n as f64 * (base.beta + base.lambda) / (1.0 - base.beta * tau).powi(base.n as i32 + 1)
}

/// Five-point central difference.
pub(crate) fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaMarinescuReport {
    pub ratio_bound: f64,
    pub max_ratio: f64,
    pub ratio_margin: f64,
    pub ratio_holds: bool,
    pub derivative_bound: f64,
    pub max_derivative: f64,
    pub derivative_checked: bool,
    pub derivative_holds: bool,
    /// Printed `(phi Q)'/Q` vs finite differences of `phi Q` over `Q`.
    pub ratio_formula_error: f64,
    /// Printed derivative vs finite differences of the printed ratio.
    pub derivative_formula_error: f64,
}

impl MaMarinescuReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.ratio_holds
            && (!self.derivative_checked || self.derivative_holds)
            && self.ratio_formula_error < tol
            && self.derivative_formula_error < tol
    }
}

pub fn ma_marinescu_bounds(base: &BaseData, tau_grid: &[f64]) -> Result<MaMarinescuReport> {
    if tau_grid.iter().any(|&t| !(t >= 0.0)) {
        return Err(Error::Domain("tau grid values must be nonnegative".into()));
    }
    let ratio_bound = -2.0 * base.lambda / base.beta + 2.0;
    let derivative_bound = 2.0 * base.n as f64 * (base.beta + base.lambda);
    let derivative_checked = base.beta + base.lambda >= 0.0;
    let phi_q = |t: f64| phi(base, t) * q_value(base, t);
    // Keep the stencil inside 1 - beta tau > 0.
    let h_at = |t: f64| 1e-3 * t.max(1.0) / base.beta.abs().max(1.0);
    let mut rep = MaMarinescuReport {
        ratio_bound,
        max_ratio: f64::NEG_INFINITY,
        ratio_margin: f64::INFINITY,
        ratio_holds: true,
        derivative_bound,
        max_derivative: f64::NEG_INFINITY,
        derivative_checked,
        derivative_holds: true,
        ratio_formula_error: 0.0,
        derivative_formula_error: 0.0,
    };
    for &t in tau_grid {
        let ratio = mm_ratio_formula(base, t);
        let deriv = mm_ratio_derivative_formula(base, t);
        let h = h_at(t);
        let numeric_ratio = central_diff(phi_q, t, h) / q_value(base, t);
        let numeric_deriv = central_diff(|x| mm_ratio_formula(base, x), t, h);
        rep.ratio_formula_error = rep.ratio_formula_error.max((ratio - numeric_ratio).abs());
        rep.derivative_formula_error = rep.derivative_formula_error.max((deriv - numeric_deriv).abs());
        rep.max_ratio = rep.max_ratio.max(ratio);
        rep.ratio_margin = rep.ratio_margin.min(ratio_bound - ratio);
        rep.max_derivative = rep.max_derivative.max(deriv);
        // Equality is attained at tau = 0 when lambda = 0.
        let strict_ok = ratio < ratio_bound || (t == 0.0 && ratio <= ratio_bound);
        rep.ratio_holds &= strict_ok;
        if derivative_checked {
            rep.derivative_holds &= deriv <= derivative_bound + 1e-12 * derivative_bound.abs();
        }
    }
    Ok(rep)
}

/// `(n, lambda, beta) -> (n, lambda / c, beta / c)`: the profile of `c omega`.
pub fn scaling_map(base: &BaseData, c: f64) -> Result<BaseData> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Domain(format!("scale factor must be positive, got {c}")));
    }
    Ok(BaseData { n: base.n, lambda: base.lambda / c, beta: base.beta / c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DoubleDouble;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ok(k: u32) -> BaseData {
        BaseData::projective_line(k).unwrap()
    }

    fn direct_profile(b: &BaseData, tau: f64) -> f64 {
        let n = b.n as i32;
        let u = 1.0 - b.beta * tau;
        2.0 / u.powi(n)
            * (tau + b.lambda * (u.powi(n + 1) - u + b.beta * b.n as f64 * tau) / (b.beta * b.beta * (b.n as f64 + 1.0)))
    }

    #[test]
    fn spot_values() {
        assert_eq!(phi_eval(&ok(1), 2.0, 0).unwrap().values.value(), 4.0);
        assert_eq!(phi_eval(&BaseData::flat(2, -1.0).unwrap(), 1.0, 0).unwrap().values.value(), 0.5);
        for b in [ok(3), BaseData::flat(3, -0.7).unwrap(), BaseData::new(2, 0.4, -2.0).unwrap()] {
            assert_eq!(phi_eval(&b, 0.0, 3).unwrap().values.value(), 0.0);
        }
    }

    #[test]
    fn validation() {
        assert!(matches!(phi_eval(&ok(1), -1.0, 2), Err(Error::Domain(_))));
        assert!(matches!(phi_eval(&ok(1), 1.0, 13), Err(Error::Contract(_))));
        assert!(BaseData::new(1, 1.0, 0.5).is_err());
        assert!(BaseData::new(0, 1.0, -0.5).is_err());
        assert!(BaseData::new(1, -1.0, -0.5).is_err());
        assert!(BaseData::projective_line(0).is_err());
    }

    #[test]
    fn expanded_form_matches_the_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let b = BaseData::new(rng.random_range(1..5), rng.random_range(0.0..3.0), -rng.random_range(0.1..3.0)).unwrap();
            let tau = rng.random_range(0.5..20.0);
            let d = direct_profile(&b, tau);
            assert!((phi(&b, tau) - d).abs() <= 1e-12 * d.abs());
        }
    }

    #[test]
    fn projective_line_specialization() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 1..=6 {
            for _ in 0..200 {
                let tau = rng.random_range(0.0..50.0);
                let want = (2.0 * tau + tau * tau) / (1.0 + k as f64 * tau / 2.0);
                let got = phi(&ok(k), tau);
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn positivity_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let b = BaseData::new(rng.random_range(1..6), rng.random_range(0.0..5.0), -rng.random_range(0.01..5.0)).unwrap();
            let tau = 10f64.powf(rng.random_range(-9.0..3.0));
            assert!(phi(&b, tau) > 0.0);
            assert!(q_value(&b, tau) > 0.0);
        }
    }

    #[test]
    fn closed_form_higher_derivatives() {
        assert_eq!(phi_k_derivative_closed_form(1, 5, 3.3).unwrap(), 0.0);
        assert_eq!(phi_k_derivative_closed_form(2, 2, 0.0).unwrap(), -2.0);
        assert_eq!(phi_k_derivative_closed_form(3, 3, 0.0).unwrap(), 18.0);
        assert!(phi_k_derivative_closed_form(3, 1, 0.0).is_err());
        for k in 1..=10 {
            for &tau in &[0.0, 0.3, 1.0, 4.0] {
                let j = phi_eval(&ok(k), tau, 6).unwrap().values;
                for m in 2..=6 {
                    let cf = phi_k_derivative_closed_form(k, m, tau).unwrap();
                    let jd = j.derivative_value(m as usize);
                    assert!((cf - jd).abs() <= 1e-10 * cf.abs() + 1e-13, "k={k} j={m} tau={tau}: {cf} vs {jd}");
                }
            }
        }
    }

    #[test]
    fn jet_derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = BaseData::new(2, 0.7, -1.3).unwrap();
        for _ in 0..6 {
            let tau = rng.random_range(0.2..5.0);
            let j = phi_eval(&b, tau, 4).unwrap().values;
            let h = 1e-2;
            let d1 = central_diff(|x| phi(&b, x), tau, h);
            let d2 = central_diff(|x| phi_jet(&b, x, 1).derivative_value(1), tau, h);
            let d3 = central_diff(|x| phi_jet(&b, x, 2).derivative_value(2), tau, h);
            let d4 = central_diff(|x| phi_jet(&b, x, 3).derivative_value(3), tau, h);
            for (m, fd) in [(1, d1), (2, d2), (3, d3), (4, d4)] {
                let jd = j.derivative_value(m);
                assert!((jd - fd).abs() <= 1e-6 * jd.abs().max(1e-3), "order {m}: {jd} vs {fd}");
            }
        }
    }

    #[test]
    fn second_derivative_display_and_limits() {
        for b in [ok(1), ok(2), ok(5), BaseData::flat(2, -1.5).unwrap(), BaseData::new(3, 0.5, -0.8).unwrap()] {
            for &mu in &[1e-3, 0.1, 0.5, 2.0] {
                let (_, p2) = condnec_phi_derivatives(&b, mu).unwrap();
                let j = phi_eval(&b, mu, 2).unwrap().values.derivative_value(2);
                assert!((p2 - j).abs() <= 1e-8 * j.abs() + 1e-13, "{b:?} mu={mu}: {p2} vs {j}");
            }
        }
        let (_, p2) = condnec_phi_derivatives(&ok(2), 1e-9).unwrap();
        assert!((p2 + 2.0).abs() < 1e-7);
        let (_, p2) = condnec_phi_derivatives(&BaseData::flat(1, -1.0).unwrap(), 1e-9).unwrap();
        assert!((p2 + 4.0).abs() < 1e-7);
    }

    #[test]
    fn first_derivative_display_is_reported_not_trusted() {
        let b = ok(1);
        let (p1, _) = condnec_phi_derivatives(&b, 0.5).unwrap();
        let j = phi_eval(&b, 0.5, 1).unwrap().values.derivative_value(1);
        assert!((j - 2.0).abs() < 1e-14);
        assert!((p1 - j).abs() > 0.1);
    }

    #[test]
    fn ricci_form() {
        for &tau in &[0.1, 1.0, 10.0] {
            let (b, f) = ricci_form_components(&ok(2), tau).unwrap();
            assert!(b.abs() < 1e-9 && f.abs() < 1e-9);
        }
        let (b, _) = ricci_form_components(&BaseData::flat(1, -1.0).unwrap(), 1.0).unwrap();
        assert!((b + 0.5).abs() < 1e-14);
        let (b, f) = ricci_form_components(&ok(1), 1.0).unwrap();
        assert!(b.abs() > 1e-3 && f.abs() > 1e-3);
        assert!(ricci_form_components(&ok(1), 0.0).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..4 {
            let b = BaseData::new(n, 1.7, -1.7).unwrap();
            for _ in 0..20 {
                let (x, y) = ricci_form_components(&b, rng.random_range(0.01..30.0)).unwrap();
                assert!(x.abs() < 1e-9 && y.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ma_marinescu() {
        let grid: Vec<f64> = (0..=2000).map(|i| 1000.0 * (i as f64 / 2000.0).powi(3)).collect();
        let flat = BaseData::flat(1, -1.0).unwrap();
        for &t in &grid {
            assert!((mm_ratio_formula(&flat, t) - 2.0 / (1.0 + t)).abs() < 1e-15);
        }
        for b in [flat, ok(1), ok(2), ok(3), BaseData::flat(2, -3.0).unwrap(), BaseData::new(2, 1.0, -0.25).unwrap()] {
            let r = ma_marinescu_bounds(&b, &grid).unwrap();
            assert!(r.passes(1e-7), "{b:?}: {r:?}");
        }
        let r = ma_marinescu_bounds(&ok(1), &grid).unwrap();
        assert_eq!(r.ratio_bound, 6.0);
        assert!(r.max_ratio < 6.0);
        assert!(ma_marinescu_bounds(&ok(1), &[-1.0]).is_err());
    }

    #[test]
    fn scaling() {
        let b = BaseData::new(1, 1.0, -0.5).unwrap();
        assert_eq!(scaling_map(&b, 2.0).unwrap(), BaseData { n: 1, lambda: 0.5, beta: -0.25 });
        assert_eq!(scaling_map(&b, 1.0).unwrap(), b);
        let back = scaling_map(&scaling_map(&b, 3.0).unwrap(), 1.0 / 3.0).unwrap();
        assert!((back.beta - b.beta).abs() < 1e-15 && (back.lambda - b.lambda).abs() < 1e-15);
        assert!(scaling_map(&b, 0.0).is_err());
    }

    #[test]
    fn double_double_profile_matches() {
        let b = ok(4);
        let a = phi_jet(&b, 0.37, 8);
        let d = phi_jet(&b, DoubleDouble::from_f64(0.37), 8);
        for m in 0..=8 {
            assert!((a.coeff(m) - d.coeff(m).to_f64()).abs() <= 1e-13 * a.coeff(m).abs().max(1.0));
        }
    }
}
