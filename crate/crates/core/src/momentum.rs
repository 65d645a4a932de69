//! Momentum table: `t(tau)` and `f(tau)` for the ODE `f'' = phi(f')`.
//!
//! With `tau = f'(t)` one has `dt/dtau = 1/phi` and `df/dtau = tau/phi`.
//! Writing `phi = 2 tau P / Q`, the singular part splits off exactly:
//! `1/phi = 1/(2 tau) + r(tau)` with `r = N/(2P)` a rational function that is
//! regular at 0, and `tau/phi = Q/(2P)` is regular too. So
//!
//! `t(tau) = ln(tau/mu0)/2 + R(tau) - R(mu0)`, `R(tau) = ∫_0^tau r`,
//! `f(tau) = G(tau) - G(mu0)`, `G(tau) = ∫_0^tau Q/(2P)`,
//!
//! normalized by `t(mu0) = 0` and `f(mu0) = 0`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::jets::{Jet, MAX_ORDER};
use crate::profile::{phi_jet, poly_eval, poly_jet, scaling_map, BaseData};
use crate::quadrature::{adaptive, gk21};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct MomentumTable {
    pub base: BaseData,
    pub mu0: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    /// Declared accuracy bound, relative to the size of the integrals.
    pub tol: f64,
    /// Summed quadrature error estimate of the node integrals, relative.
    pub achieved: f64,
    nodes: Vec<f64>,
    r_cum: Vec<f64>,
    g_cum: Vec<f64>,
    t_nodes: Vec<f64>,
    r_mu0: f64,
    g_mu0: f64,
    p: Vec<f64>,
    q: Vec<f64>,
    nq: Vec<f64>,
}

pub const DEFAULT_MU0: f64 = 1.0;

/// Default sampled span `[mu0 * 1e-9, max(1e3, 10 mu0)]`.
pub fn default_range(mu0: f64) -> (f64, f64) {
    (mu0 * 1e-9, (1e3f64).max(10.0 * mu0))
}

impl MomentumTable {
    pub fn build(base: BaseData, mu0: f64, tau_range: (f64, f64), tol: f64) -> Result<Self> {
        build_table(base, mu0, tau_range, tol)
    }

    /// Table over the default span with tolerance `1e-11`.
    pub fn with_defaults(base: BaseData, mu0: f64) -> Result<Self> {
        build_table(base, mu0, default_range(mu0), 1e-11)
    }

    fn r_int(&self, s: f64) -> f64 {
        poly_eval(&self.nq, s) / (2.0 * poly_eval(&self.p, s))
    }

    fn g_int(&self, s: f64) -> f64 {
        poly_eval(&self.q, s) / (2.0 * poly_eval(&self.p, s))
    }

    fn check_tau(&self, tau: f64) -> Result<()> {
        if !(tau >= 0.0) {
            return Err(Error::Domain(format!("tau must be nonnegative, got {tau}")));
        }
        if tau > self.tau_max * (1.0 + 1e-14) {
            return Err(Error::Range {
                message: "tau beyond the momentum table".into(),
                tau_lo: tau.min(self.tau_max),
                tau_hi: tau,
                tau_max: self.tau_max,
            });
        }
        Ok(())
    }

    fn locate(&self, tau: f64) -> usize {
        match self.nodes.binary_search_by(|x| x.partial_cmp(&tau).unwrap()) {
            Ok(i) => i.min(self.nodes.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.nodes.len() - 2),
        }
    }

    /// `(R(tau), G(tau))` from the nearest node below plus one Kronrod panel.
    fn integrals(&self, tau: f64) -> Result<(f64, f64)> {
        self.check_tau(tau)?;
        let i = self.locate(tau);
        let a = self.nodes[i];
        if tau == a {
            return Ok((self.r_cum[i], self.g_cum[i]));
        }
        let r = gk21(|s| self.r_int(s), a, tau).value;
        let g = gk21(|s| self.g_int(s), a, tau).value;
        Ok((self.r_cum[i] + r, self.g_cum[i] + g))
    }

    /// `R(tau) = ∫_0^tau (1/phi - 1/(2s)) ds`.
    pub fn regular_part(&self, tau: f64) -> Result<f64> {
        Ok(self.integrals(tau)?.0)
    }

    pub fn t_of_tau(&self, tau: f64) -> Result<f64> {
        let (r, _) = self.integrals(tau)?;
        Ok(0.5 * (tau / self.mu0).ln() + (r - self.r_mu0))
    }

    pub fn f_of_tau(&self, tau: f64) -> Result<f64> {
        let (_, g) = self.integrals(tau)?;
        Ok(g - self.g_mu0)
    }

    /// `(t, f)` at `tau`.
    pub fn eval(&self, tau: f64) -> Result<(f64, f64)> {
        let (r, g) = self.integrals(tau)?;
        Ok((0.5 * (tau / self.mu0).ln() + (r - self.r_mu0), g - self.g_mu0))
    }

    pub fn t_max(&self) -> f64 {
        *self.t_nodes.last().unwrap()
    }

    /// Monotone inversion `t -> tau`: bracket on the nodes, then safeguarded
    /// Newton in `ln tau` using `dt/d ln tau = tau / phi`.
    pub fn tau_of_t(&self, t: f64) -> Result<f64> {
        if t.is_nan() {
            return Err(Error::Domain("t is NaN".into()));
        }
        if t == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        if t > self.t_max() {
            return Err(Error::Range {
                message: format!("t = {t} beyond the table end t = {}", self.t_max()),
                tau_lo: self.tau_max,
                tau_hi: f64::INFINITY,
                tau_max: self.tau_max,
            });
        }
        // t_nodes[0] = -inf at tau = 0.
        let i = self.t_nodes.partition_point(|&x| x <= t).clamp(1, self.t_nodes.len() - 1);
        let (mut lo, mut hi) = if i == 1 {
            let t1 = self.t_nodes[1];
            let spread = 2.0 * self.r_cum[1].abs() + 2.0;
            (self.nodes[1] * (2.0 * (t - t1) - spread).exp(), self.nodes[1])
        } else {
            (self.nodes[i - 1], self.nodes[i])
        };
        let mut u = if i == 1 {
            (self.nodes[1] * (2.0 * (t - self.t_nodes[1])).exp()).ln()
        } else {
            0.5 * (lo.ln() + hi.ln())
        };
        for _ in 0..200 {
            let tau = u.exp();
            let g = self.t_of_tau(tau)? - t;
            if g > 0.0 {
                hi = hi.min(tau);
            } else {
                lo = lo.max(tau);
            }
            let slope = tau * self.inv_phi(tau);
            let mut un = u - g / slope;
            if !(un > lo.ln() && un < hi.ln()) {
                un = 0.5 * (lo.ln() + hi.ln());
            }
            if (un - u).abs() < 1e-16 * u.abs().max(1.0) || hi <= lo * (1.0 + 4.0 * f64::EPSILON) {
                return Ok(un.exp());
            }
            u = un;
        }
        Err(Error::Accuracy { achieved: (hi - lo) / hi, requested: 1e-15 })
    }

    pub fn f_of_t(&self, t: f64) -> Result<f64> {
        self.f_of_tau(self.tau_of_t(t)?)
    }

    fn inv_phi(&self, tau: f64) -> f64 {
        1.0 / (2.0 * tau) + self.r_int(tau)
    }

    /// `K` in `w = |xi|^2 h = e^{2t} = tau K exp(2 R(tau))`.
    pub fn w_scale(&self) -> f64 {
        (-2.0 * self.r_mu0).exp() / self.mu0
    }

    /// `ln w` at `tau`, i.e. `2 t(tau)`.
    pub fn ln_w_of_tau(&self, tau: f64) -> Result<f64> {
        Ok(2.0 * self.t_of_tau(tau)?)
    }

    /// Momentum at `w = e^{2t}`.
    pub fn tau_of_w(&self, w: f64) -> Result<f64> {
        if !(w >= 0.0) {
            return Err(Error::Domain(format!("w must be nonnegative, got {w}")));
        }
        if w == 0.0 {
            return Ok(0.0);
        }
        self.tau_of_t(0.5 * w.ln())
    }

    /// Jet of `F(w) = f(t)` at `w0 = e^{2 t0}`, regular down to `w0 = 0`.
    ///
    /// `w(tau) = tau K exp(2R)` is reverted to `tau(w)` and `F' = tau/(2w) = exp(-2R(tau(w)))/(2K)`
    /// is integrated, so no `ln w` appears.
    pub fn fibre_potential_jet(&self, w0: f64, order: usize) -> Result<Jet> {
        let k = self.w_scale();
        let j = self.fibre_potential_jet_scaled(w0 / k, order)?;
        let c: Vec<f64> = j.coeffs().iter().enumerate().map(|(m, c)| c / k.powi(m as i32)).collect();
        let out = Jet::new(c)?;
        if !out.is_finite() {
            return Err(Error::Range {
                message: "fibre potential overflows at this point".into(),
                tau_lo: self.tau_of_w(w0)?,
                tau_hi: self.tau_of_w(w0)?,
                tau_max: self.tau_max,
            });
        }
        Ok(out)
    }

    /// Same jet in the variable `w / w_scale()`, which stays well scaled for any gauge.
    pub fn fibre_potential_jet_scaled(&self, v0: f64, order: usize) -> Result<Jet> {
        let k = 1.0;
        let tau0 = self.tau_of_w(v0 * self.w_scale())?;
        let (r0, g0) = self.integrals(tau0)?;
        let t = Jet::variable(tau0, order);
        let rj = poly_jet(&self.nq, &t).div_jet(&poly_jet(&self.p, &t).scale(2.0))?.truncate(order.saturating_sub(1));
        let big_r = rj.integral(r0).truncate(order);
        let w_of_tau = (&t * &big_r.scale(2.0).exp()).scale(k);
        let tau_of_w = w_of_tau.revert(tau0)?;
        let r_of_w = Jet::compose(&big_r, &tau_of_w)?;
        let dfdw = r_of_w.scale(-2.0).exp().scale(1.0 / (2.0 * k));
        let out = dfdw.integral(g0 - self.g_mu0).truncate(order);
        if !out.is_finite() {
            return Err(Error::Range {
                message: "fibre potential overflows at this point".into(),
                tau_lo: tau0,
                tau_hi: tau0,
                tau_max: self.tau_max,
            });
        }
        Ok(out)
    }

    /// Sampled `(tau, t, f)` triples at the nodes in `[tau_min, tau_max]`.
    pub fn samples(&self) -> Vec<(f64, f64, f64)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, &x)| x >= self.tau_min)
            .map(|(i, &x)| (x, self.t_nodes[i], self.g_cum[i] - self.g_mu0))
            .collect()
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "tau,t,f")?;
        for (tau, t, f) in self.samples() {
            writeln!(w, "{tau:.17e},{t:.17e},{f:.17e}")?;
        }
        Ok(())
    }
}

pub fn build_table(base: BaseData, mu0: f64, tau_range: (f64, f64), tol: f64) -> Result<MomentumTable> {
    let (tau_min, tau_max) = tau_range;
    if !(mu0 > 0.0) || !mu0.is_finite() {
        return Err(Error::Domain(format!("mu0 must be positive, got {mu0}")));
    }
    if !(0.0 < tau_min && tau_min < mu0 && mu0 < tau_max && tau_max.is_finite()) {
        return Err(Error::Domain(format!(
            "need 0 < tau_min < mu0 < tau_max, got ({tau_min}, {mu0}, {tau_max})"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let p = base.p_poly();
    let q = base.q_poly();
    let nq = base.n_poly();
    let r_int = |s: f64| poly_eval(&nq, s) / (2.0 * poly_eval(&p, s));
    let g_int = |s: f64| poly_eval(&q, s) / (2.0 * poly_eval(&p, s));

    // Geometric breakpoints resolve the integrands' scale relative to their
    // poles on the negative axis; mu0 is always a breakpoint.
    let mut breaks = vec![0.0, tau_min];
    let mut x = tau_min;
    while x * 2.0 < tau_max {
        x *= 2.0;
        breaks.push(x);
    }
    breaks.push(mu0);
    breaks.push(tau_max);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();

    let mut nodes = vec![0.0];
    let mut r_cum = vec![0.0];
    let mut g_cum = vec![0.0];
    let mut achieved = 0.0;
    let mut magnitude = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let rr = adaptive(r_int, a, b, 1e-17 * (b - a), 1e-13, 200)?;
        let gg = adaptive(g_int, a, b, 1e-17 * (b - a), 1e-13, 200)?;
        magnitude += rr.value.abs() + gg.value.abs();
        achieved += rr.error + gg.error;
        // Merge the two partitions so every node panel is resolved for both integrands.
        let mut cuts: Vec<f64> = rr.pieces.iter().chain(gg.pieces.iter()).map(|p| p.1).collect();
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();
        let mut left = a;
        for c in cuts {
            let dr = gk21(r_int, left, c).value;
            let dg = gk21(g_int, left, c).value;
            r_cum.push(r_cum.last().unwrap() + dr);
            g_cum.push(g_cum.last().unwrap() + dg);
            nodes.push(c);
            left = c;
        }
    }
    let achieved = achieved / magnitude.max(1.0);
    if achieved > tol {
        return Err(Error::Accuracy { achieved, requested: tol });
    }
    let imu = nodes.iter().position(|&x| x == mu0).expect("mu0 is a breakpoint");
    let r_mu0 = r_cum[imu];
    let g_mu0 = g_cum[imu];
    let t_nodes = nodes
        .iter()
        .zip(&r_cum)
        .map(|(&x, &r)| if x == 0.0 { f64::NEG_INFINITY } else { 0.5 * (x / mu0).ln() + (r - r_mu0) })
        .collect();
    Ok(MomentumTable { base, mu0, tau_min, tau_max, tol, achieved, nodes, r_cum, g_cum, t_nodes, r_mu0, g_mu0, p, q, nq })
}

/// `f', f'', ..., f^(order)` at the point where `f' = tau`, as a jet in `t`
/// (the constant slot is zero; `f` itself depends on the normalization).
///
/// Uses `f^(m) = phi * d/dtau f^(m-1)` starting from `f' = tau`.
pub fn f_derivatives_at<S: Scalar>(base: &BaseData, tau: S, order: usize) -> Result<Jet<S>> {
    if !(tau.to_f64() > 0.0) {
        return Err(Error::Domain("the momentum at the point must be positive".into()));
    }
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Contract(format!("derivative order must lie in 1..={MAX_ORDER}")));
    }
    let ph = phi_jet(base, tau, order - 1);
    let mut g = Jet::variable(tau, order - 1);
    let mut c = vec![S::zero(); order + 1];
    c[1] = tau;
    for m in 2..=order {
        let d = g.derivative();
        g = &ph.truncate(d.order()) * &d;
        c[m] = g.value() / S::from_f64(crate::jets::factorial(m));
    }
    Ok(Jet::from_vec(c))
}

/// `max |c f(t) - fhat(t)|` over a `t` grid, where `fhat` is built for the
/// scaled base `(beta/c, lambda/c)` with gauge `c mu0`.
pub fn scaling_check(base: &BaseData, c: f64, mu0: f64) -> Result<f64> {
    let scaled = scaling_map(base, c)?;
    let range = (mu0 * 1e-9, 1e3f64.max(100.0 * mu0));
    let t0 = build_table(*base, mu0, range, 1e-11)?;
    let t1 = build_table(scaled, c * mu0, (c * range.0, c * range.1), 1e-11)?;
    let mut worst = 0.0f64;
    for i in 0..=40 {
        let tau = mu0 * 10f64.powf(-3.0 + 4.3 * i as f64 / 40.0);
        let t = t0.t_of_tau(tau)?;
        let f = t0.f_of_tau(tau)?;
        let fhat = t1.f_of_t(t)?;
        worst = worst.max((c * f - fhat).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::phi;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ok(k: u32) -> BaseData {
        BaseData::projective_line(k).unwrap()
    }

    #[test]
    fn linear_profile_closed_form() {
        let mu0 = 0.7;
        let tab = MomentumTable::with_defaults(ok(1), mu0).unwrap();
        for &tau in &[1e-8, 1e-3, 0.2, 0.7, 3.0, 50.0, 900.0] {
            let (t, f) = tab.eval(tau).unwrap();
            let t_want = 0.5 * (tau / mu0).ln();
            assert!((t - t_want).abs() < 1e-10 * t_want.abs().max(1.0));
            let f_want = mu0 / 2.0 * ((2.0 * t_want).exp() - 1.0);
            assert!((f - f_want).abs() < 1e-10 * f_want.abs().max(1.0));
        }
    }

    #[test]
    fn flat_line_closed_form() {
        let mu0 = 1.3;
        let tab = MomentumTable::with_defaults(BaseData::flat(1, -1.0).unwrap(), mu0).unwrap();
        for &tau in &[1e-8, 0.1, 1.3, 7.0, 400.0] {
            let t = tab.t_of_tau(tau).unwrap();
            let want = 0.5 * (tau / mu0).ln() + (tau - mu0) / 2.0;
            assert!((t - want).abs() < 1e-10 * want.abs().max(1.0));
            // f = ∫ s (1+s)/(2s) ds
            let f = tab.f_of_tau(tau).unwrap();
            let fw = (tau - mu0) / 2.0 + (tau * tau - mu0 * mu0) / 4.0;
            assert!((f - fw).abs() < 1e-10 * fw.abs().max(1.0));
        }
    }

    #[test]
    fn o_minus_k_closed_form() {
        let mu0 = 1.0;
        for k in 2..=5u32 {
            let kk = k as f64;
            let tab = MomentumTable::with_defaults(ok(k), mu0).unwrap();
            for &tau in &[1e-6, 0.3, 2.0, 60.0] {
                let (t, f) = tab.eval(tau).unwrap();
                let tw = 0.5 * (tau / mu0).ln() + (kk - 1.0) / 2.0 * ((2.0 + tau) / (2.0 + mu0)).ln();
                let fw = kk / 2.0 * (tau - mu0) + (1.0 - kk) * ((2.0 + tau) / (2.0 + mu0)).ln();
                assert!((t - tw).abs() < 1e-11 * tw.abs().max(1.0));
                assert!((f - fw).abs() < 1e-11 * fw.abs().max(1.0));
            }
        }
    }

    #[test]
    fn normalization_and_surjectivity() {
        let tab = MomentumTable::with_defaults(BaseData::flat(2, -1.0).unwrap(), 1.0).unwrap();
        assert_eq!(tab.t_of_tau(1.0).unwrap(), 0.0);
        assert_eq!(tab.f_of_tau(1.0).unwrap(), 0.0);
        assert!(tab.t_of_tau(1e-9).unwrap() < -10.0);
        let s = tab.samples();
        assert!(s.windows(2).all(|w| w[1].1 > w[0].1 && w[1].2 > w[0].2));
        assert_eq!(s[0].0, tab.tau_min);
    }

    #[test]
    fn round_trip_inversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for b in [ok(1), ok(3), BaseData::flat(3, -2.0).unwrap(), BaseData::new(2, 1.0, -0.4).unwrap()] {
            let tab = MomentumTable::with_defaults(b, 1.0).unwrap();
            for _ in 0..100 {
                let tau = 10f64.powf(rng.random_range(-8.0..2.9));
                let t = tab.t_of_tau(tau).unwrap();
                let back = tab.tau_of_t(t).unwrap();
                assert!((back - tau).abs() <= 1e-9 * tau, "{b:?}: {tau} -> {t} -> {back}");
            }
        }
    }

    #[test]
    fn ode_residual_by_table_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let b = BaseData::new(2, 1.0, -0.7).unwrap();
        let tab = MomentumTable::with_defaults(b, 1.0).unwrap();
        for _ in 0..50 {
            let t = rng.random_range(-3.0..2.0);
            let h = 1e-3;
            let f = |x: f64| tab.f_of_t(x).unwrap();
            let f2 = (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2.0 * h)) / (12.0 * h * h);
            let f1 = crate::profile::central_diff(f, t, h);
            assert!((f2 - phi(&b, f1)).abs() < 1e-8 * f2.abs().max(1.0));
        }
    }

    #[test]
    fn range_and_domain_errors() {
        let tab = MomentumTable::with_defaults(ok(2), 1.0).unwrap();
        assert!(matches!(tab.t_of_tau(5e3), Err(Error::Range { .. })));
        assert!(matches!(tab.tau_of_t(1e6), Err(Error::Range { .. })));
        assert!(build_table(ok(2), 1.0, (2.0, 10.0), 1e-10).is_err());
        assert!(build_table(ok(2), 1.0, (0.0, 10.0), 1e-10).is_err());
    }

    #[test]
    fn derivative_recursion() {
        let tau = 0.8;
        let j = f_derivatives_at(&ok(1), tau, 4).unwrap();
        let d: Vec<f64> = (1..=4).map(|m| j.derivative_value(m)).collect();
        assert_eq!(d[0], tau);
        assert!((d[1] - 2.0 * tau).abs() < 1e-15);
        assert!((d[2] - 4.0 * tau).abs() < 1e-15);
        assert!((d[3] - 8.0 * tau).abs() < 1e-14);
        let b = BaseData::flat(2, -1.5).unwrap();
        let j2 = f_derivatives_at(&b, 0.3, 2).unwrap();
        assert!((j2.derivative_value(2) - phi(&b, 0.3)).abs() < 1e-15);
    }

    #[test]
    fn derivative_recursion_matches_table_differences() {
        let b = BaseData::new(1, 1.0, -1.5).unwrap();
        let tab = MomentumTable::with_defaults(b, 1.0).unwrap();
        let f = |x: f64| tab.f_of_t(x).unwrap();
        let t = 0.3;
        let tau = tab.tau_of_t(t).unwrap();
        let j = f_derivatives_at(&b, tau, 4).unwrap();
        let h = 2e-2;
        let d1 = crate::profile::central_diff(f, t, h);
        let d3 = (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h)) / (2.0 * h.powi(3));
        let d4 = (f(t + 2.0 * h) - 4.0 * f(t + h) + 6.0 * f(t) - 4.0 * f(t - h) + f(t - 2.0 * h)) / h.powi(4);
        assert!((d1 - j.derivative_value(1)).abs() < 1e-6);
        assert!((d3 - j.derivative_value(3)).abs() < 1e-3 * j.derivative_value(3).abs());
        assert!((d4 - j.derivative_value(4)).abs() < 1e-2 * j.derivative_value(4).abs());
    }

    #[test]
    fn fibre_potential_jet_matches_linear_closed_form() {
        // k = 1: F(w) = (mu0/2)(w - 1).
        let mu0 = 0.6;
        let tab = MomentumTable::with_defaults(ok(1), mu0).unwrap();
        for &w0 in &[0.0, 0.3, 1.0, 5.0] {
            let j = tab.fibre_potential_jet(w0, 6).unwrap();
            assert!((j.value() - mu0 / 2.0 * (w0 - 1.0)).abs() < 1e-13);
            assert!((j.coeff(1) - mu0 / 2.0).abs() < 1e-13);
            for m in 2..=6 {
                assert!(j.coeff(m).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fibre_potential_jet_derivative_is_tau_over_2w() {
        let tab = MomentumTable::with_defaults(BaseData::flat(2, -1.0).unwrap(), 1.0).unwrap();
        for &w0 in &[0.2, 1.0, 3.0] {
            let j = tab.fibre_potential_jet(w0, 4).unwrap();
            let tau = tab.tau_of_w(w0).unwrap();
            assert!((j.coeff(1) - tau / (2.0 * w0)).abs() < 1e-13);
            let h = 1e-3;
            let fd = crate::profile::central_diff(|w| tab.f_of_t(0.5 * w.ln()).unwrap(), w0, h);
            assert!((fd - j.coeff(1)).abs() < 1e-9);
        }
    }

    #[test]
    fn scaling_law() {
        for (b, c) in [(ok(2), 2.0), (BaseData::flat(2, -1.0).unwrap(), 3.0), (ok(1), 0.5)] {
            let e = scaling_check(&b, c, 1.0).unwrap();
            assert!(e < 1e-7, "{b:?} c={c}: {e}");
        }
        assert!(scaling_check(&ok(2), 1.0, 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn csv_export() {
        let tab = MomentumTable::with_defaults(ok(1), 1.0).unwrap();
        let mut buf = Vec::new();
        tab.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("tau,t,f\n"));
        assert_eq!(s.lines().count(), tab.samples().len() + 1);
    }
}
