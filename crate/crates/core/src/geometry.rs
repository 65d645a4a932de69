//! Potential, metric and curvature on the total space.
//!
//! Conventions: `omega = (i/2) ddbar Psi`, `g_{i jbar} = d_i dbar_j Psi`,
//! `Ric_{i jbar} = -d_i dbar_j log det g`, `sigma = g^{i jbar} Ric_{i jbar}` and
//! `R_{i jbar k lbar} = -d_k dbar_l g_{i jbar} + g^{p qbar} d_k g_{i qbar} dbar_l g_{p jbar}`.
//! Coordinates are ordered `(z_1, ..., z_n, xi)`.
//!
//! The fibre part of the potential is written as `4 F(w)` with `w = |xi|^2 h(z)`,
//! which is analytic at `w = 0`, so the zero section needs no special casing.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::scalar::{DoubleDouble, Scalar};
use crate::momentum::{default_range, f_derivatives_at, MomentumTable};
use crate::multijet::MultiJet;
use crate::profile::{phi, BaseData, Family};

/// Factor taking the `a2` expression in the naive tensor contractions to the
/// normalization of the closed-form `a2` (fixed at `k = 2`, `tau = 0`).
pub const A2_SCALE: f64 = 24.0;

/// From this momentum on, curvature is evaluated in the chart `xi = exp(zeta)`.
const LOG_CHART_TAU: f64 = 0.1;
const CURVATURE_DEGREE: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct PointTotalSpace {
    pub z: Vec<Complex64>,
    pub xi: Complex64,
}

impl PointTotalSpace {
    pub fn new(z: Vec<Complex64>, xi: Complex64) -> Self {
        PointTotalSpace { z, xi }
    }

    pub fn norm2_z(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum()
    }
}

#[derive(Clone, Debug)]
pub struct MetricData {
    pub g: DMatrix<Complex64>,
    pub g_inv: DMatrix<Complex64>,
    pub det: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvaturePath {
    Tensor,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub sigma: f64,
    pub riem_norm2: f64,
    pub ric_norm2: f64,
    pub lap_sigma: f64,
    pub a1: f64,
    /// `A2_SCALE * a2_lu`, comparable with [`a2_closed_form`].
    pub a2: f64,
    /// `lap_sigma/3 + (riem_norm2 - 4 ric_norm2 + 3 sigma^2)/24`.
    pub a2_lu: f64,
    pub path: CurvaturePath,
}

impl CurvatureReport {
    pub fn from_parts(sigma: f64, riem_norm2: f64, ric_norm2: f64, lap_sigma: f64, path: CurvaturePath) -> Self {
        let a2_lu = lap_sigma / 3.0 + (riem_norm2 - 4.0 * ric_norm2 + 3.0 * sigma * sigma) / 24.0;
        CurvatureReport { sigma, riem_norm2, ric_norm2, lap_sigma, a1: sigma / 2.0, a2: A2_SCALE * a2_lu, a2_lu, path }
    }
}

fn check_inputs(family: &Family, table: &MomentumTable, p: &PointTotalSpace) -> Result<()> {
    family.validate()?;
    let (a, b) = (family.base(), table.base);
    if a.n != b.n || a.lambda != b.lambda || a.beta != b.beta {
        return Err(Error::Contract(format!("momentum table was built for a different base than {}", family.label())));
    }
    if p.z.len() != a.n as usize {
        return Err(Error::Contract(format!("point has {} base coordinates, expected {}", p.z.len(), a.n)));
    }
    if !p.xi.re.is_finite() || !p.xi.im.is_finite() || p.z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Domain("point coordinates must be finite".into()));
    }
    Ok(())
}

/// Base potential `Phi(s)` and fibre metric `h(s)` as jets in `s = |z|^2` at `s0`.
fn base_jets(family: &Family, s0: f64, order: usize) -> Result<(Jet, Jet)> {
    let s = Jet::variable(s0, order);
    match *family {
        Family::OMinusK { k } => {
            let u = s.scale(0.25).add_scalar(1.0);
            Ok((u.ln()?.scale(4.0), u.powi(k as i32)?))
        }
        Family::Flat { beta, .. } => Ok((s.clone(), s.scale(-beta / 2.0).exp())),
    }
}

/// `h(z)` at `|z|^2 = s0`.
pub fn fibre_metric(family: &Family, s0: f64) -> f64 {
    match *family {
        Family::OMinusK { k } => (1.0 + s0 / 4.0).powi(k as i32),
        Family::Flat { beta, .. } => (-beta * s0 / 2.0).exp(),
    }
}

fn base_potential(family: &Family, s0: f64) -> f64 {
    match *family {
        Family::OMinusK { .. } => 4.0 * (s0 / 4.0).ln_1p(),
        Family::Flat { .. } => s0,
    }
}

/// Taylor jet of `Psi` at `p` in the `2(n+1)` Wirtinger variables, total degree `degree`.
pub fn potential_jet(family: &Family, table: &MomentumTable, p: &PointTotalSpace, degree: usize) -> Result<MultiJet> {
    check_inputs(family, table, p)?;
    if degree == 0 {
        return Err(Error::Contract("potential jet needs degree at least 1".into()));
    }
    let n = p.z.len();
    let dim = n + 1;
    let nv = 2 * dim;
    let zero = Complex64::new(0.0, 0.0);
    let mut s = MultiJet::constant(nv, degree, zero)?;
    for (i, zi) in p.z.iter().enumerate() {
        let a = MultiJet::variable(nv, degree, i, *zi)?;
        let b = MultiJet::variable(nv, degree, dim + i, zi.conj())?;
        s = s.add(&a.mul(&b));
    }
    let s0 = p.norm2_z();
    let (phi_s, h_s) = base_jets(family, s0, degree)?;
    let big_phi = s.compose_jet(&phi_s)?;
    let h = s.compose_jet(&h_s)?;
    let x = MultiJet::variable(nv, degree, n, p.xi)?;
    let xb = MultiJet::variable(nv, degree, dim + n, p.xi.conj())?;
    let w = x.mul(&xb).mul(&h);
    let h0 = fibre_metric(family, s0);
    let w0 = p.xi.norm_sqr() * h0;
    if w0 <= table.w_scale() {
        let k = table.w_scale();
        let fw = table.fibre_potential_jet_scaled(w0 / k, degree)?;
        return Ok(big_phi.add(&w.scale_re(1.0 / k).compose_jet(&fw)?.scale_re(4.0)));
    }
    // Away from the zero section expand f in t = ln(w)/2; derivatives of F in w
    // scale like w^-j and underflow when w is large.
    let tau0 = table.tau_of_w(w0)?;
    let fj = f_derivatives_at(&table.base, tau0, degree)?;
    let mut series: Vec<Complex64> = (0..=degree).map(|m| Complex64::new(fj.coeff(m), 0.0)).collect();
    series[0] = Complex64::new(table.f_of_tau(tau0)?, 0.0);
    let dt = x
        .scale(1.0 / p.xi)
        .ln()?
        .add(&xb.scale(1.0 / p.xi.conj()).ln()?)
        .add(&h.scale_re(1.0 / h0).ln()?)
        .scale_re(0.5);
    Ok(big_phi.add(&dt.compose(&series).scale_re(4.0)))
}

/// Jet of `Psi` in the coordinates `(z, zeta)` with `xi = exp(zeta)`, centred
/// at `p` (`xi != 0`). Scalar curvature invariants do not depend on the chart,
/// and here `t = Re zeta + ln(h)/2` is linear in the fibre variable.
fn potential_jet_log(family: &Family, table: &MomentumTable, p: &PointTotalSpace, degree: usize) -> Result<MultiJet> {
    check_inputs(family, table, p)?;
    let n = p.z.len();
    let dim = n + 1;
    let nv = 2 * dim;
    let zero = Complex64::new(0.0, 0.0);
    let mut s = MultiJet::constant(nv, degree, zero)?;
    for (i, zi) in p.z.iter().enumerate() {
        let a = MultiJet::variable(nv, degree, i, *zi)?;
        let b = MultiJet::variable(nv, degree, dim + i, zi.conj())?;
        s = s.add(&a.mul(&b));
    }
    let s0 = p.norm2_z();
    let (phi_s, h_s) = base_jets(family, s0, degree)?;
    let big_phi = s.compose_jet(&phi_s)?;
    let h0 = fibre_metric(family, s0);
    let lh = s.compose_jet(&h_s)?.scale_re(1.0 / h0).ln()?;
    let u = MultiJet::variable(nv, degree, n, zero)?;
    let ub = MultiJet::variable(nv, degree, dim + n, zero)?;
    let dt = u.add(&ub).add(&lh).scale_re(0.5);
    let tau0 = table.tau_of_w(p.xi.norm_sqr() * h0)?;
    let fj = f_derivatives_at(&table.base, tau0, degree)?;
    let mut series: Vec<Complex64> = (0..=degree).map(|m| Complex64::new(fj.coeff(m), 0.0)).collect();
    series[0] = Complex64::new(table.f_of_tau(tau0)?, 0.0);
    Ok(big_phi.add(&dt.compose(&series).scale_re(4.0)))
}

/// `Psi(p) = Phi(z) + 4 f(t)`, `t = log(|xi|^2 h(z))/2`.
pub fn potential(family: &Family, table: &MomentumTable, p: &PointTotalSpace) -> Result<f64> {
    check_inputs(family, table, p)?;
    let s0 = p.norm2_z();
    let w = p.xi.norm_sqr() * fibre_metric(family, s0);
    let tau = table.tau_of_w(w)?;
    Ok(base_potential(family, s0) + 4.0 * table.f_of_tau(tau)?)
}

/// Momentum `tau = f'(t)` at `p`.
pub fn momentum_at(family: &Family, table: &MomentumTable, p: &PointTotalSpace) -> Result<f64> {
    check_inputs(family, table, p)?;
    table.tau_of_w(p.xi.norm_sqr() * fibre_metric(family, p.norm2_z()))
}

/// The point over `z` at momentum `tau` with `arg xi = theta`.
pub fn point_at_tau(family: &Family, table: &MomentumTable, tau: f64, z: Vec<Complex64>, theta: f64) -> Result<PointTotalSpace> {
    let s0: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    let w = if tau == 0.0 { 0.0 } else { table.ln_w_of_tau(tau)?.exp() };
    let r = (w / fibre_metric(family, s0)).sqrt();
    if !r.is_finite() || (tau > 0.0 && r == 0.0) {
        return Err(Error::Range {
            message: "|xi| at this momentum is not representable in double precision".into(),
            tau_lo: tau,
            tau_hi: tau,
            tau_max: table.tau_max,
        });
    }
    let p = PointTotalSpace { z, xi: Complex64::from_polar(r, theta) };
    check_inputs(family, table, &p)?;
    Ok(p)
}

pub fn metric_at(family: &Family, table: &MomentumTable, p: &PointTotalSpace) -> Result<MetricData> {
    let psi = potential_jet(family, table, p, 2)?;
    let dim = p.z.len() + 1;
    let g = DMatrix::from_fn(dim, dim, |i, j| psi.d11(i, dim + j));
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Geometry(format!("Hessian of the potential is not positive definite at {p:?}")))?;
    let det = chol.l_dirty().diagonal().iter().map(|d| d.norm_sqr()).product();
    Ok(MetricData { g, g_inv: chol.inverse(), det })
}

/// Gauss–Jordan on a Hermitian positive definite matrix of jets, returning
/// the inverse and `log det`.
fn invert_jet_matrix(a: &[Vec<MultiJet>]) -> Result<(Vec<Vec<MultiJet>>, MultiJet)> {
    let n = a.len();
    let mut m: Vec<Vec<MultiJet>> = a.to_vec();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut inv: Vec<Vec<MultiJet>> = (0..n)
        .map(|i| (0..n).map(|j| m[0][0].scale(zero).add_scalar(if i == j { one } else { zero })).collect())
        .collect();
    let mut logdet = m[0][0].scale(zero);
    for k in 0..n {
        let piv = m[k][k].clone();
        if !(piv.value().re > 0.0) {
            return Err(Error::Geometry("metric is not positive definite".into()));
        }
        logdet = logdet.add(&piv.ln()?);
        let r = piv.recip()?;
        for j in 0..n {
            m[k][j] = m[k][j].mul(&r);
            inv[k][j] = inv[k][j].mul(&r);
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m[i][k].clone();
            for j in 0..n {
                m[i][j] = m[i][j].sub(&f.mul(&m[k][j]));
                inv[i][j] = inv[i][j].sub(&f.mul(&inv[k][j]));
            }
        }
    }
    Ok((inv, logdet))
}

/// Curvature at `p` by differentiating the potential jet.
pub fn curvature_tensor_path(family: &Family, table: &MomentumTable, p: &PointTotalSpace) -> Result<CurvatureReport> {
    let psi = if p.xi.norm_sqr() > 0.0 && momentum_at(family, table, p)? >= LOG_CHART_TAU {
        potential_jet_log(family, table, p, CURVATURE_DEGREE)?
    } else {
        potential_jet(family, table, p, CURVATURE_DEGREE)?
    };
    let dim = p.z.len() + 1;
    let g: Vec<Vec<MultiJet>> =
        (0..dim).map(|i| (0..dim).map(|j| psi.derivative(i).derivative(dim + j)).collect()).collect();
    let (ginv, logdet) = invert_jet_matrix(&g)?;
    let ric: Vec<Vec<MultiJet>> =
        (0..dim).map(|i| (0..dim).map(|j| logdet.derivative(i).derivative(dim + j).scale_re(-1.0)).collect()).collect();
    let mut sigma_j = ric[0][0].scale_re(0.0);
    for i in 0..dim {
        for j in 0..dim {
            sigma_j = sigma_j.add(&ginv[j][i].mul(&ric[i][j]));
        }
    }
    // g^{a bbar} = up(a, b)
    let h0: Vec<Vec<Complex64>> = ginv.iter().map(|row| row.iter().map(|x| x.value()).collect()).collect();
    let up = |a: usize, b: usize| h0[b][a];

    let mut lap = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            lap += up(i, j) * sigma_j.d11(i, dim + j);
        }
    }

    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * dim + j) * dim + k) * dim + l;
    let mut r = vec![Complex64::new(0.0, 0.0); dim.pow(4)];
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let mut v = -g[i][j].d11(k, dim + l);
                    for pp in 0..dim {
                        for q in 0..dim {
                            v += up(pp, q) * g[i][q].d1(k) * g[pp][j].d1(dim + l);
                        }
                    }
                    r[idx(i, j, k, l)] = v;
                }
            }
        }
    }
    // Raise one index at a time: T^{a bbar c dbar} from conj(R).
    let mut t: Vec<Complex64> = r.iter().map(|x| x.conj()).collect();
    for slot in 0..4 {
        let mut next = vec![Complex64::new(0.0, 0.0); t.len()];
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let o = [i, j, k, l];
                        let mut acc = Complex64::new(0.0, 0.0);
                        for m in 0..dim {
                            let mut src = o;
                            src[slot] = m;
                            // holomorphic slots contract as g^{o m̄}, antiholomorphic as g^{m ō}
                            let gf = if slot % 2 == 0 { up(o[slot], m) } else { up(m, o[slot]) };
                            acc += gf * t[idx(src[0], src[1], src[2], src[3])];
                        }
                        next[idx(i, j, k, l)] = acc;
                    }
                }
            }
        }
        t = next;
    }
    let riem2: Complex64 = r.iter().zip(&t).map(|(a, b)| a * b).sum();

    let mut ric2 = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    ric2 += up(i, a) * up(b, j) * ric[i][j].value() * ric[a][b].value().conj();
                }
            }
        }
    }
    let sigma = sigma_j.value().re;
    if !(sigma.is_finite() && riem2.re.is_finite() && ric2.re.is_finite() && lap.re.is_finite()) {
        return Err(Error::Geometry("curvature is not finite at this point".into()));
    }
    Ok(CurvatureReport::from_parts(sigma, riem2.re, ric2.re, lap.re, CurvaturePath::Tensor))
}

/// Recomputes `A2_SCALE` from the tensor path at `k = 2`, `tau = 0`.
pub fn calibrate_a2_scale() -> Result<f64> {
    let family = Family::OMinusK { k: 2 };
    let table = MomentumTable::with_defaults(family.base(), 1.0)?;
    let p = PointTotalSpace::new(vec![Complex64::new(0.0, 0.0)], Complex64::new(0.0, 0.0));
    let rep = curvature_tensor_path(&family, &table, &p)?;
    Ok(a2_closed_form(2, 0.0) / rep.a2_lu)
}

/// `a2` for the metrics on `O(-k)`.
pub fn a2_closed_form(k: u32, tau: f64) -> f64 {
    let k = k as f64;
    -48.0 * (k - 1.0) * (k * k * tau - 2.0 * k * tau - 2.0) / (k * tau + 2.0).powi(6)
}

fn pw<S: Scalar>(x: S, n: u32) -> S {
    (0..n).fold(S::one(), |acc, _| acc * x)
}

/// `(|R|^2, |Ric|^2)` on `O(-k)` from `f', ..., f''''` at the point.
pub fn norms_closed_form(k: u32, f_jet: &Jet) -> Result<(f64, f64)> {
    norms_closed_form_s(k, f_jet)
}

pub fn norms_closed_form_s<S: Scalar>(k: u32, f_jet: &Jet<S>) -> Result<(S, S)> {
    if f_jet.order() < 4 {
        return Err(Error::Contract("norms need f derivatives up to order 4".into()));
    }
    let c = S::from_f64;
    let k = c(k as f64);
    let f1 = f_jet.derivative_value(1);
    let f2 = f_jet.derivative_value(2);
    let f3 = f_jet.derivative_value(3);
    let f4 = f_jet.derivative_value(4);
    if !(f2.to_f64() > 0.0) {
        return Err(Error::Domain("f'' must be positive".into()));
    }
    let a = k * f1 + c(2.0);
    let riem = (f4 * f4 / pw(f2, 4) + pw(f3, 4) / pw(f2, 6) - c(8.0) * (pw(k, 3) * f3 - c(2.0) * k * f1 - c(4.0)) / pw(a, 3)
        + c(8.0) * pw(k, 4) * f2 * f2 / pw(a, 4)
        - c(16.0) * k * k * f2 / pw(a, 3)
        - c(2.0) * f3 * f3 * f4 / pw(f2, 5)
        + c(4.0) * k * k * f3 * f3 / (f2 * f2 * a * a))
        / c(16.0);
    let ric = (c(16.0) / (a * a) + pw(f3, 4) / pw(f2, 6) + c(2.0) * pw(k, 4) * f2 * f2 / pw(a, 4)
        - c(8.0) * k * k * f2 / pw(a, 3)
        - c(2.0) * f3 * f3 * f4 / pw(f2, 5)
        + c(4.0) * k * k * f3 * f3 / (f2 * f2 * a * a)
        + c(2.0) * k * f3 * f4 / (pw(f2, 3) * a)
        - c(2.0) * k * (k * f4 + c(4.0) * f3) / (f2 * a * a)
        + f4 * f4 / pw(f2, 4)
        - c(2.0) * k * pw(f3, 3) / (a * pw(f2, 4)))
        / c(16.0);
    Ok((riem, ric))
}

/// Report on `O(-k)` from the closed-form norms, with `sigma = 0`.
///
/// The norms are written in `f`-derivatives, which all vanish on the zero
/// section; at `tau = 0` the limit is taken by Richardson extrapolation from
/// `tau = h, 2h` in double-double arithmetic.
pub fn curvature_closed_form(k: u32, tau: f64) -> Result<CurvatureReport> {
    if !(tau >= 0.0) {
        return Err(Error::Domain("the momentum must be nonnegative".into()));
    }
    let base = BaseData::projective_line(k)?;
    let (riem, ric) = if tau == 0.0 {
        let at = |t: f64| -> Result<(DoubleDouble, DoubleDouble)> {
            norms_closed_form_s(k, &f_derivatives_at(&base, DoubleDouble::from_f64(t), 4)?)
        };
        const H: f64 = 1e-9;
        let (r1, c1) = at(H)?;
        let (r2, c2) = at(2.0 * H)?;
        let two = DoubleDouble::from_f64(2.0);
        ((two * r1 - r2).to_f64(), (two * c1 - c2).to_f64())
    } else {
        norms_closed_form(k, &f_derivatives_at(&base, tau, 4)?)?
    };
    Ok(CurvatureReport::from_parts(0.0, riem, ric, 0.0, CurvaturePath::ClosedForm))
}

/// The displayed `a2` expression for the flat family in `n`, `beta`, `tau`.
pub fn a2_flat_closed_form(base: &BaseData, tau: f64) -> Result<f64> {
    if base.lambda != 0.0 {
        return Err(Error::Contract("flat-family formula needs lambda = 0".into()));
    }
    let n = base.n as f64;
    let b = base.beta;
    let p2 = 2f64.powi(base.n as i32);
    let poly = b * b * n.powi(4) * tau * tau
        + n * (b * b * p2 * tau * tau + 2.0 * b * (p2 + 4.0) * tau + p2 - 4.0)
        + p2 * (1.0 - b * b * tau * tau)
        + b * n.powi(3) * tau * (b * (p2 - 2.0) * tau + 4.0)
        + b * n * n * tau * (b * (p2 - 3.0) * tau + 2.0 * (p2 + 2.0));
    Ok(b * b / (4.0 * (1.0 - b * tau).powi(2 * (base.n as i32 + 2))) * poly)
}

/// `a2` on the flat family for `n <= 3`, in the reduced form; `None` for larger `n`.
pub fn a2_flat_reduced(n: u32, beta: f64, tau: f64) -> Option<f64> {
    let bt = beta * tau;
    let b3t = beta.powi(3) * tau;
    match n {
        1 => Some(6.0 * b3t / (1.0 - bt).powi(6)),
        2 => Some(6.0 * b3t * (bt + 4.0) / (1.0 - bt).powi(8)),
        3 => Some(30.0 * b3t * (bt + 2.0) / (1.0 - bt).powi(10)),
        _ => None,
    }
}

/// `det g` on `O(-k)`: `(1 + k tau/2) phi(tau) / (|xi|^2 (1 + |z|^2/4)^2)`.
pub fn det_closed_form(k: u32, tau: f64, p: &PointTotalSpace) -> Result<f64> {
    let base = BaseData::projective_line(k)?;
    let x2 = p.xi.norm_sqr();
    if x2 == 0.0 {
        return Err(Error::Domain("closed-form determinant needs xi != 0".into()));
    }
    let u = 1.0 + p.norm2_z() / 4.0;
    Ok((1.0 + k as f64 * tau / 2.0) * phi(&base, tau) / (x2 * u * u))
}

/// `max |c g_beta(z, xi) - J^T g_{beta/c}(sqrt(c) z, xi) J|` over the probes,
/// relative to `max(1, |c g_beta|)`, with `J = diag(sqrt(c), ..., sqrt(c), 1)`.
pub fn rescale_equivalence_check(n: u32, beta: f64, c: f64, probes: &[PointTotalSpace]) -> Result<f64> {
    if !(c > 0.0) || !(beta < 0.0) {
        return Err(Error::Domain("need c > 0 and beta < 0".into()));
    }
    let f1 = Family::Flat { n, beta };
    let f2 = Family::Flat { n, beta: beta / c };
    let t1 = MomentumTable::with_defaults(f1.base(), 1.0)?;
    let t2 = MomentumTable::build(f2.base(), c, default_range(c), 1e-11)?;
    let sc = c.sqrt();
    let mut worst = 0.0f64;
    for p in probes {
        let g1 = metric_at(&f1, &t1, p)?.g;
        let q = PointTotalSpace::new(p.z.iter().map(|z| z * sc).collect(), p.xi);
        let g2 = metric_at(&f2, &t2, &q)?.g;
        let dim = g1.nrows();
        let jac = |i: usize| if i + 1 < dim { sc } else { 1.0 };
        let scale = g1.iter().map(|x| x.norm() * c).fold(1.0f64, f64::max);
        for i in 0..dim {
            for j in 0..dim {
                let d = g1[(i, j)] * c - g2[(i, j)] * (jac(i) * jac(j));
                worst = worst.max(d.norm() / scale);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn table(f: &Family, mu0: f64) -> MomentumTable {
        MomentumTable::with_defaults(f.base(), mu0).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng, f: &Family, t: &MomentumTable, tau_hi: f64) -> (PointTotalSpace, f64) {
        let n = f.base().n as usize;
        let z: Vec<Complex64> = (0..n).map(|_| cz(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5))).collect();
        let tau = rng.random_range(0.01..tau_hi);
        (point_at_tau(f, t, tau, z, rng.random_range(0.0..6.28)).unwrap(), tau)
    }

    #[test]
    fn potential_on_o_minus_one_is_linear_in_w() {
        let f = Family::OMinusK { k: 1 };
        for mu0 in [1.0, 0.5] {
            let t = table(&f, mu0);
            for r in [0.3, 1.0, 2.2] {
                let p = PointTotalSpace::new(vec![cz(0.0, 0.0)], cz(0.0, r));
                let psi = potential(&f, &t, &p).unwrap();
                assert!((psi - 2.0 * mu0 * (r * r - 1.0)).abs() < 1e-10, "{psi}");
            }
        }
    }

    #[test]
    fn flat_potential_matches_the_fibre_formula() {
        let f = Family::Flat { n: 2, beta: -0.7 };
        let t = table(&f, 1.0);
        let p = PointTotalSpace::new(vec![cz(0.3, -0.2), cz(0.5, 0.1)], cz(1.1, 0.4));
        let s = p.norm2_z();
        let tt = 0.5 * (p.xi.norm_sqr() * (0.35 * s).exp()).ln();
        let want = s + 4.0 * t.f_of_t(tt).unwrap();
        assert!((potential(&f, &t, &p).unwrap() - want).abs() < 1e-12);
        let j = potential_jet(&f, &t, &p, 3).unwrap();
        assert!((j.value().re - want).abs() < 1e-10);
    }

    #[test]
    fn metric_at_the_fibre_over_zero() {
        for k in 1..=4u32 {
            let f = Family::OMinusK { k };
            let t = table(&f, 1.0);
            for tau in [0.2, 1.0, 3.5] {
                let p = point_at_tau(&f, &t, tau, vec![cz(0.0, 0.0)], 0.7).unwrap();
                let m = metric_at(&f, &t, &p).unwrap();
                let kf = k as f64;
                assert!((m.g[(0, 0)].re - (kf * tau + 2.0) / 2.0).abs() < 1e-10);
                assert!(m.g[(0, 1)].norm() < 1e-12);
                let want = phi(&f.base(), tau) / p.xi.norm_sqr();
                assert!((m.g[(1, 1)].re - want).abs() < 1e-9 * want);
            }
        }
    }

    #[test]
    fn determinant_identity_and_inverse_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 1..=6u32 {
            let f = Family::OMinusK { k };
            let t = table(&f, 1.0);
            for _ in 0..50 {
                let (p, tau) = random_point(&mut rng, &f, &t, 5.0);
                let m = metric_at(&f, &t, &p).unwrap();
                let want = det_closed_form(k, tau, &p).unwrap();
                assert!((m.det - want).abs() < 1e-8 * want, "k={k}: {} vs {want}", m.det);
                let herm = (&m.g - m.g.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
                assert!(herm < 1e-12);
                let id = &m.g * &m.g_inv - DMatrix::<Complex64>::identity(2, 2);
                assert!(id.iter().all(|x| x.norm() < 1e-10));
            }
        }
    }

    #[test]
    fn scalar_flat_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fams = [
            Family::OMinusK { k: 1 },
            Family::OMinusK { k: 2 },
            Family::OMinusK { k: 5 },
            Family::Flat { n: 1, beta: -1.0 },
            Family::Flat { n: 2, beta: -0.5 },
            Family::Flat { n: 3, beta: -1.0 },
        ];
        for f in fams {
            let t = table(&f, 1.0);
            for _ in 0..4 {
                let (p, _) = random_point(&mut rng, &f, &t, 4.0);
                let r = curvature_tensor_path(&f, &t, &p).unwrap();
                assert!(r.sigma.abs() < 1e-7, "{}: sigma = {}", f.label(), r.sigma);
                assert!(r.lap_sigma.abs() < 1e-6, "{}: lap = {}", f.label(), r.lap_sigma);
                assert!(r.riem_norm2 >= 0.0 && r.ric_norm2 >= 0.0);
            }
        }
    }

    #[test]
    fn k2_is_ricci_flat() {
        let f = Family::OMinusK { k: 2 };
        let t = table(&f, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let (p, _) = random_point(&mut rng, &f, &t, 5.0);
            let r = curvature_tensor_path(&f, &t, &p).unwrap();
            assert!(r.ric_norm2 < 1e-12, "{}", r.ric_norm2);
        }
    }

    #[test]
    fn a2_scale_reproduces_on_recalibration() {
        let s = calibrate_a2_scale().unwrap();
        assert!((s - A2_SCALE).abs() < 1e-8, "{s}");
    }

    #[test]
    fn a2_closed_form_values() {
        assert_eq!(a2_closed_form(1, 2.7), 0.0);
        assert!((a2_closed_form(2, 0.0) - 1.5).abs() < 1e-15);
        assert!((a2_closed_form(3, 1.0) + 96.0 / 15625.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_path_matches_closed_forms_on_o_minus_k() {
        for k in 1..=6u32 {
            let f = Family::OMinusK { k };
            let t = table(&f, 1.0);
            for tau in [0.0, 0.3, 1.0, 2.5, 5.0] {
                let p = point_at_tau(&f, &t, tau, vec![cz(0.4, -0.3)], 1.0).unwrap();
                let r = curvature_tensor_path(&f, &t, &p).unwrap();
                let want = a2_closed_form(k, tau);
                assert!((r.a2 - want).abs() <= 1e-6 * want.abs().max(1e-3), "k={k} tau={tau}: {} vs {want}", r.a2);
                if tau > 0.0 {
                    let c = curvature_closed_form(k, tau).unwrap();
                    assert!((c.riem_norm2 - r.riem_norm2).abs() <= 1e-6 * r.riem_norm2.max(1e-6));
                    assert!((c.ric_norm2 - r.ric_norm2).abs() <= 1e-6 * r.ric_norm2.max(1e-6));
                    assert!((c.a2 - want).abs() <= 1e-6 * want.abs().max(1e-3));
                }
            }
        }
    }

    #[test]
    fn closed_form_norm_identities() {
        for tau in [0.1, 1.0, 4.0] {
            let b2 = BaseData::projective_line(2).unwrap();
            let (_, ric) = norms_closed_form(2, &f_derivatives_at(&b2, tau, 4).unwrap()).unwrap();
            assert!(ric.abs() < 1e-12);
            let b1 = BaseData::projective_line(1).unwrap();
            let (r, ric) = norms_closed_form(1, &f_derivatives_at(&b1, tau, 4).unwrap()).unwrap();
            assert!((r - 4.0 * ric).abs() < 1e-12);
        }
        // The combination |R|^2 - 4|Ric|^2 is the closed-form a2 itself.
        let b3 = BaseData::projective_line(3).unwrap();
        let (r, ric) = norms_closed_form(3, &f_derivatives_at(&b3, 1.0, 4).unwrap()).unwrap();
        assert!((r - 4.0 * ric + 0.006144).abs() < 1e-12);
    }

    #[test]
    fn flat_family_display_agrees_for_one_base_dimension() {
        for beta in [-1.0, -0.4, -2.0] {
            let f = Family::Flat { n: 1, beta };
            let t = table(&f, 1.0);
            for tau in [0.0, 0.5, 2.0] {
                let p = point_at_tau(&f, &t, tau, vec![cz(0.2, 0.1)], 0.0).unwrap();
                let r = curvature_tensor_path(&f, &t, &p).unwrap();
                let want = a2_flat_closed_form(&f.base(), tau).unwrap();
                assert!((r.a2 - want).abs() <= 1e-6 * want.abs().max(1e-3), "beta={beta} tau={tau}: {} vs {want}", r.a2);
            }
        }
    }

    #[test]
    fn flat_family_tensor_values_in_higher_dimension() {
        for n in [2u32, 3] {
            let f = Family::Flat { n, beta: -0.8 };
            let t = table(&f, 1.0);
            let z = vec![cz(0.1, 0.2); n as usize];
            for tau in [0.5, 1.5] {
                let p = point_at_tau(&f, &t, tau, z.clone(), 0.3).unwrap();
                let r = curvature_tensor_path(&f, &t, &p).unwrap();
                let want = a2_flat_reduced(n, -0.8, tau).unwrap();
                assert!((r.a2 - want).abs() < 1e-6 * want.abs(), "n={n}: {} vs {want}", r.a2);
                let printed = a2_flat_closed_form(&f.base(), tau).unwrap();
                assert!((printed - want).abs() > 1e-3 * want.abs());
            }
        }
    }

    #[test]
    fn a2_is_order_beta_squared_for_small_beta() {
        let at = |n, b| a2_flat_closed_form(&BaseData::flat(n, b).unwrap(), 0.5).unwrap();
        assert!((at(2, -2e-5) / at(2, -1e-5) - 4.0).abs() < 1e-2);
        // for n = 1 the beta^2 term cancels and the decay is faster
        assert!((at(1, -1e-3) / 1e-6).abs() < 1e-2);
    }

    #[test]
    fn rescaling_the_bundle_curvature() {
        let probes = vec![
            PointTotalSpace::new(vec![cz(0.3, 0.2)], cz(0.8, -0.1)),
            PointTotalSpace::new(vec![cz(-0.5, 0.9)], cz(0.1, 0.3)),
            PointTotalSpace::new(vec![cz(1.2, 0.0)], cz(2.0, 1.0)),
        ];
        assert!(rescale_equivalence_check(1, -1.0, 1.0, &probes).unwrap() < 1e-12);
        assert!(rescale_equivalence_check(1, -1.0, 2.0, &probes).unwrap() < 1e-7);
        assert!(rescale_equivalence_check(1, -3.0, 1.0, &probes).unwrap() < 1e-7);
        assert!(rescale_equivalence_check(1, -3.0, 3.0, &probes).unwrap() < 1e-7);
        let probes2 = vec![PointTotalSpace::new(vec![cz(0.3, 0.2), cz(0.1, -0.4)], cz(0.8, -0.1))];
        assert!(rescale_equivalence_check(2, -0.5, 0.25, &probes2).unwrap() < 1e-7);
    }

    #[test]
    fn curvature_is_gauge_invariant() {
        let f = Family::OMinusK { k: 3 };
        let ta = table(&f, 1.0);
        let tb = table(&f, 0.3);
        for tau in [0.05, 0.7, 2.0] {
            let pa = point_at_tau(&f, &ta, tau, vec![cz(0.2, 0.5)], 0.0).unwrap();
            let pb = point_at_tau(&f, &tb, tau, vec![cz(0.2, 0.5)], 0.0).unwrap();
            let ra = curvature_tensor_path(&f, &ta, &pa).unwrap();
            let rb = curvature_tensor_path(&f, &tb, &pb).unwrap();
            assert!((ra.a2 - rb.a2).abs() < 1e-7 && (ra.riem_norm2 - rb.riem_norm2).abs() < 1e-7);
        }
    }

    #[test]
    fn fourth_order_jet_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..10 {
            let f = if i % 2 == 0 { Family::OMinusK { k: (i / 2 + 1) as u32 } } else { Family::Flat { n: 2, beta: -1.0 } };
            let t = table(&f, 1.0);
            let (p, _) = random_point(&mut rng, &f, &t, 3.0);
            let dim = p.z.len() + 1;
            let v: Vec<Complex64> = (0..dim).map(|_| cz(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let mut dx = v.clone();
            dx.extend(v.iter().map(|c| c.conj()));
            let jet = potential_jet(&f, &t, &p, 4).unwrap();
            let want = jet.along(&dx)[4].re * 24.0;
            let at = |h: f64| {
                let q = PointTotalSpace::new(p.z.iter().zip(&v).map(|(z, d)| z + d * h).collect(), p.xi + v[dim - 1] * h);
                potential(&f, &t, &q).unwrap()
            };
            let w = [-1.0 / 6.0, 2.0, -13.0 / 2.0, 28.0 / 3.0, -13.0 / 2.0, 2.0, -1.0 / 6.0];
            let d4 = |h: f64| w.iter().enumerate().map(|(j, c)| c * at((j as f64 - 3.0) * h)).sum::<f64>() / h.powi(4);
            // Richardson steps on the O(h^4) stencil; keep the most stable pair.
            let hs = [0.08, 0.04, 0.02, 0.01, 0.005, 0.0025];
            let d: Vec<f64> = hs.iter().map(|&h| d4(h)).collect();
            let r: Vec<f64> = d.windows(2).map(|p| (16.0 * p[1] - p[0]) / 15.0).collect();
            let fd = r.windows(2).min_by(|a, b| (a[0] - a[1]).abs().total_cmp(&(b[0] - b[1]).abs())).unwrap()[1];
            assert!((fd - want).abs() < 1e-5 * want.abs().max(1.0), "{fd} vs {want}");
        }
    }

    #[test]
    fn points_beyond_the_table_are_range_errors() {
        let f = Family::OMinusK { k: 2 };
        let t = MomentumTable::build(f.base(), 1.0, (1e-9, 10.0), 1e-11).unwrap();
        let p = PointTotalSpace::new(vec![cz(0.0, 0.0)], cz(1e4, 0.0));
        assert!(matches!(metric_at(&f, &t, &p), Err(Error::Range { .. })));
        let bad = PointTotalSpace::new(vec![], cz(1.0, 0.0));
        assert!(matches!(potential(&f, &t, &bad), Err(Error::Contract(_))));
    }
}
