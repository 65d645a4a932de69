//! Weighted Bergman spaces of monomials `z^m xi^l` and the epsilon function
//! `eps(x) = sum |s_j(x)|^2 exp(-alpha Psi(x))` over an orthonormal basis.
//!
//! The weight `exp(-alpha Psi)` and the volume form `det g` are invariant under
//! the rotations of each coordinate, so the monomials are orthogonal and
//! `||z^m xi^l||^2 = pi^(n+1) B(m, l) T_l` splits into a base factor `B` and the
//! fibre factor `T_l = 2 ∫ exp(2 l t - 4 alpha f) Q dtau`.
//!
//! On `O(-k)` the base factor is `∫ r^m (1 + r/4)^(-(4 alpha + 2 + k l)) dr`, finite
//! iff `m <= 4 alpha + k l` when `4 alpha` is an integer. On the flat family it is
//! `prod_j m_j! / c^(m_j + 1)` with `c = alpha - l beta / 2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{momentum_at, point_at_tau, potential, PointTotalSpace};
use crate::momentum::MomentumTable;
use crate::profile::Family;
use crate::quadrature::{adaptive, log_integral_line, CompensatedSum};

pub const QUAD_TOL: f64 = 1e-12;
/// Blocks below this fraction of the running sum end the `l` summation.
pub const TAIL_TOL: f64 = 1e-16;
const MAX_SPAN: f64 = 4000.0;
const LN_PI: f64 = 1.144_729_885_849_400_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// `exp(-alpha Psi) det g` from the metric itself.
    Metric,
    /// `exp(-alpha (|z|^2 + |xi|^2))` with the Euclidean volume.
    GaussianModel,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HilbertBasisSpec {
    pub family: Family,
    pub alpha: f64,
    pub l_max: u32,
    /// Added to the `O(-k)` degree bound `4 alpha + k l`.
    pub bound_offset: i64,
    pub weight: Weight,
}

impl HilbertBasisSpec {
    pub fn new(family: Family, alpha: f64) -> Result<Self> {
        let s = HilbertBasisSpec { family, alpha, l_max: 600, bound_offset: 0, weight: Weight::Metric };
        s.validate()?;
        Ok(s)
    }

    pub fn with_weight(mut self, weight: Weight) -> Result<Self> {
        self.weight = weight;
        self.validate()?;
        Ok(self)
    }

    pub fn with_bound_offset(mut self, offset: i64) -> Self {
        self.bound_offset = offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Domain("alpha must be positive".into()));
        }
        if self.weight == Weight::GaussianModel {
            return Ok(());
        }
        match self.family {
            Family::OMinusK { .. } => {
                let q = 4.0 * self.alpha;
                if (q - q.round()).abs() > 1e-12 {
                    return Err(Error::Domain("4 alpha must be an integer on O(-k)".into()));
                }
                if self.alpha <= 0.25 {
                    return Err(Error::Domain("alpha must exceed 1/4 on O(-k)".into()));
                }
            }
            Family::Flat { n, .. } => {
                if self.alpha <= n as f64 / 4.0 {
                    return Err(Error::Domain(format!("alpha must exceed n/4 = {}", n as f64 / 4.0)));
                }
            }
        }
        Ok(())
    }

    /// Largest admissible base degree at fibre degree `l` (`None`: unbounded).
    pub fn degree_bound(&self, l: u32) -> Option<i64> {
        match (self.weight, self.family) {
            (Weight::Metric, Family::OMinusK { k }) => Some((4.0 * self.alpha).round() as i64 + (k * l) as i64 + self.bound_offset),
            _ => None,
        }
    }

    fn base_dim(&self) -> usize {
        self.family.base().n as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonEstimate {
    pub z: Vec<(f64, f64)>,
    pub xi: (f64, f64),
    /// Momentum at the point (`None` for the Gaussian model).
    pub tau: Option<f64>,
    pub alpha: f64,
    pub value: f64,
    pub l_used: u32,
    pub tail_bound: f64,
    pub quad_tol: f64,
    /// Members of the requested basis whose norms diverge and were left out.
    pub excluded: usize,
}

/// Norms and epsilon for one `(spec, table)` pair; fibre integrals are cached.
pub struct Quantization<'a> {
    spec: HilbertBasisSpec,
    table: &'a MomentumTable,
    ln_fibre: Vec<f64>,
}

fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln(1 + e^v / 4)` without overflow.
fn ln1p_exp_over_4(v: f64) -> f64 {
    let x = v - 4f64.ln();
    if x > 30.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

impl<'a> Quantization<'a> {
    pub fn new(spec: HilbertBasisSpec, table: &'a MomentumTable) -> Result<Self> {
        spec.validate()?;
        if spec.weight == Weight::Metric {
            let (a, b) = (spec.family.base(), table.base);
            if a.n != b.n || a.lambda != b.lambda || a.beta != b.beta {
                return Err(Error::Contract("momentum table does not belong to the family".into()));
            }
        }
        Ok(Quantization { spec, table, ln_fibre: Vec::new() })
    }

    pub fn spec(&self) -> &HilbertBasisSpec {
        &self.spec
    }

    /// `ln T_l` by quadrature in `v = ln tau` (or `ln r` for the Gaussian model).
    pub fn ln_fibre_integral(&mut self, l: u32) -> Result<f64> {
        while self.ln_fibre.len() <= l as usize {
            let next = self.compute_fibre(self.ln_fibre.len() as u32)?;
            self.ln_fibre.push(next);
        }
        Ok(self.ln_fibre[l as usize])
    }

    fn compute_fibre(&self, l: u32) -> Result<f64> {
        let alpha = self.spec.alpha;
        let lf = l as f64;
        if self.spec.weight == Weight::GaussianModel {
            return log_integral_line(|v| (lf + 1.0) * v - alpha * v.exp(), ((lf + 1.0) / alpha).ln(), QUAD_TOL, MAX_SPAN);
        }
        let table = self.table;
        let base = table.base;
        let tau_max = table.tau_max;
        let lq = |tau: f64| (1.0 - base.beta * tau).powi(base.n as i32).ln();
        let integrand = |v: f64| -> f64 {
            let tau = v.exp();
            if tau > tau_max {
                return f64::NEG_INFINITY;
            }
            match table.eval(tau) {
                Ok((t, f)) => std::f64::consts::LN_2 + 2.0 * lf * t - 4.0 * alpha * f + lq(tau) + v,
                Err(_) => f64::NAN,
            }
        };
        let v0 = ((lf + 1.0) / (2.0 * alpha)).ln().min(tau_max.ln() - 1.0);
        let value = log_integral_line(integrand, v0, QUAD_TOL, MAX_SPAN)?;
        // the window must have closed before the end of the table
        let edge = integrand(tau_max.ln());
        if edge.is_finite() && edge > value - 40.0 {
            return Err(Error::Range {
                message: format!("fibre integral for l = {l} is not negligible at the table end"),
                tau_lo: tau_max,
                tau_hi: f64::INFINITY,
                tau_max,
            });
        }
        Ok(value)
    }

    /// `ln` of the base factor for one coordinate with exponent `m`, by quadrature.
    fn ln_base_quadrature(&self, m: u32, l: u32) -> Result<f64> {
        let mf = m as f64;
        let alpha = self.spec.alpha;
        match (self.spec.weight, self.spec.family) {
            (Weight::Metric, Family::OMinusK { k }) => {
                let big_n = 4.0 * alpha + 2.0 + (k * l) as f64;
                let exponent = mf + 1.0 - big_n;
                if exponent >= 0.0 {
                    return Err(Error::DivergentNorm(format!(
                        "base integrand decays like r^{} at infinity; need m < 4 alpha + 1 + k l = {}",
                        mf - big_n,
                        big_n - 1.0
                    )));
                }
                log_integral_line(|v| (mf + 1.0) * v - big_n * ln1p_exp_over_4(v), (mf + 1.0).ln(), QUAD_TOL, MAX_SPAN)
            }
            (Weight::Metric, Family::Flat { beta, .. }) => {
                let c = alpha - l as f64 * beta / 2.0;
                log_integral_line(|v| (mf + 1.0) * v - c * v.exp(), ((mf + 1.0) / c).ln(), QUAD_TOL, MAX_SPAN)
            }
            (Weight::GaussianModel, _) => {
                log_integral_line(|v| (mf + 1.0) * v - alpha * v.exp(), ((mf + 1.0) / alpha).ln(), QUAD_TOL, MAX_SPAN)
            }
        }
    }

    /// `ln` of the base factor from Beta/Gamma functions.
    fn ln_base_closed(&self, m: u32, l: u32) -> Option<f64> {
        let mf = m as f64;
        let alpha = self.spec.alpha;
        match (self.spec.weight, self.spec.family) {
            (Weight::Metric, Family::OMinusK { k }) => {
                let big_n = 4.0 * alpha + 2.0 + (k * l) as f64;
                let b = big_n - 1.0 - mf;
                if b <= 0.0 {
                    return None;
                }
                Some((mf + 1.0) * 4f64.ln() + lgamma(mf + 1.0) + lgamma(b) - lgamma(mf + 1.0 + b))
            }
            (Weight::Metric, Family::Flat { beta, .. }) => {
                let c = alpha - l as f64 * beta / 2.0;
                Some(lgamma(mf + 1.0) - (mf + 1.0) * c.ln())
            }
            (Weight::GaussianModel, _) => Some(lgamma(mf + 1.0) - (mf + 1.0) * alpha.ln()),
        }
    }

    fn check_member(&self, m: &[u32], l: u32) -> Result<()> {
        if m.len() != self.spec.base_dim() {
            return Err(Error::Contract(format!("monomial needs {} base exponents", self.spec.base_dim())));
        }
        if l > self.spec.l_max {
            return Err(Error::Contract(format!("fibre degree {l} above l_max = {}", self.spec.l_max)));
        }
        if let Some(bound) = self.spec.degree_bound(l) {
            if m[0] as i64 > bound {
                return Err(Error::Contract(format!("z^{} xi^{l} is outside the basis (bound {bound})", m[0])));
            }
        }
        Ok(())
    }

    /// `ln ||z^m xi^l||^2`, every factor by adaptive quadrature.
    pub fn log_norm(&mut self, m: &[u32], l: u32) -> Result<f64> {
        self.check_member(m, l)?;
        let mut acc = (m.len() + 1) as f64 * LN_PI + self.ln_fibre_integral(l)?;
        for &mj in m {
            acc += self.ln_base_quadrature(mj, l)?;
        }
        Ok(acc)
    }

    /// Same norm with the base factors in closed form.
    pub fn log_norm_closed(&mut self, m: &[u32], l: u32) -> Result<f64> {
        self.check_member(m, l)?;
        let mut acc = (m.len() + 1) as f64 * LN_PI + self.ln_fibre_integral(l)?;
        for &mj in m {
            acc += self
                .ln_base_closed(mj, l)
                .ok_or_else(|| Error::DivergentNorm(format!("base factor of z^{mj} xi^{l} diverges")))?;
        }
        Ok(acc)
    }

    /// `|<z^a xi^l, z^b xi^l'>| / (||z^a xi^l|| ||z^b xi^l'||)` with the angular
    /// integrals done numerically.
    pub fn orthogonality_residual(&mut self, a: (&[u32], u32), b: (&[u32], u32)) -> Result<f64> {
        self.check_member(a.0, a.1)?;
        self.check_member(b.0, b.1)?;
        let two_pi = 2.0 * std::f64::consts::PI;
        let angular = |d: i64| -> Result<f64> {
            let d = d as f64;
            let re = adaptive(|th| (d * th).cos(), 0.0, two_pi, 1e-12, 0.0, 200)?.value;
            let im = adaptive(|th| (d * th).sin(), 0.0, two_pi, 1e-12, 0.0, 200)?.value;
            Ok(re.hypot(im) / two_pi)
        };
        let mut ratio = angular(a.1 as i64 - b.1 as i64)?;
        for (x, y) in a.0.iter().zip(b.0) {
            ratio *= angular(*x as i64 - *y as i64)?;
        }
        // the radial parts are bounded by the norms, so the angular factor bounds the cosine
        Ok(ratio)
    }

    /// `ln` of `sum_m |z^m|^2 / B(m, l)` at `|z_j|^2 = r_j`, and the number of
    /// divergent members skipped.
    fn ln_base_sum(&self, r: &[f64], l: u32) -> (f64, usize) {
        let mut excluded = 0;
        let mut total = 0.0;
        for &rj in r {
            let lr = if rj > 0.0 { rj.ln() } else { f64::NEG_INFINITY };
            let term = |m: u32, lb: f64| if m == 0 { -lb } else { m as f64 * lr - lb };
            let mut acc = f64::NEG_INFINITY;
            match self.spec.degree_bound(l) {
                Some(bound) => {
                    for m in 0..=bound.max(-1) {
                        match self.ln_base_closed(m as u32, l) {
                            Some(lb) if m == 0 || rj > 0.0 => acc = log_add(acc, term(m as u32, lb)),
                            Some(_) => {}
                            None => excluded += 1,
                        }
                    }
                }
                None => {
                    let mut m = 0u32;
                    loop {
                        let lb = self.ln_base_closed(m, l).expect("flat base factors converge");
                        let t = term(m, lb);
                        acc = log_add(acc, t);
                        if rj == 0.0 || (m as f64 > 2.0 * self.flat_rate(l) * rj + 10.0 && t < acc - 46.0) {
                            break;
                        }
                        m += 1;
                    }
                }
            }
            total += acc;
        }
        (total, excluded)
    }

    fn flat_rate(&self, l: u32) -> f64 {
        match (self.spec.weight, self.spec.family) {
            (Weight::Metric, Family::Flat { beta, .. }) => self.spec.alpha - l as f64 * beta / 2.0,
            _ => self.spec.alpha,
        }
    }

    fn point_data(&self, p: &PointTotalSpace) -> Result<(Vec<f64>, f64, f64, Option<f64>)> {
        let n = self.spec.base_dim();
        if p.z.len() != n {
            return Err(Error::Contract(format!("point has {} base coordinates, expected {n}", p.z.len())));
        }
        let alpha = self.spec.alpha;
        let r: Vec<f64> = p.z.iter().map(|c| c.norm_sqr()).collect();
        let x2 = p.xi.norm_sqr();
        Ok(match self.spec.weight {
            Weight::Metric => (
                r,
                x2,
                -alpha * potential(&self.spec.family, self.table, p)?,
                Some(momentum_at(&self.spec.family, self.table, p)?),
            ),
            Weight::GaussianModel => {
                let lw = -alpha * (r.iter().sum::<f64>() + x2);
                (r, x2, lw, None)
            }
        })
    }

    /// Contribution of the monomials `z^m xi^l` with fixed `l`, and the number of
    /// divergent members left out.
    fn block(&mut self, r: &[f64], x2: f64, ln_weight: f64, l: u32) -> Result<(f64, usize)> {
        let (lb, ex) = self.ln_base_sum(r, l);
        let lxl = if l == 0 { 0.0 } else if x2 > 0.0 { l as f64 * x2.ln() } else { f64::NEG_INFINITY };
        let dim = (self.spec.base_dim() + 1) as f64;
        Ok(((lxl + ln_weight - dim * LN_PI - self.ln_fibre_integral(l)? + lb).exp(), ex))
    }

    /// Sum of the blocks `l = 0..=l_end` at `p`.
    pub fn partial_sum(&mut self, p: &PointTotalSpace, l_end: u32) -> Result<f64> {
        let (r, x2, ln_weight, _) = self.point_data(p)?;
        let mut sum = CompensatedSum::new();
        for l in 0..=l_end {
            sum.add(self.block(&r, x2, ln_weight, l)?.0);
        }
        Ok(sum.value())
    }

    /// `eps` at `p`, summing `l`-blocks until they fall below `TAIL_TOL` of the total.
    pub fn epsilon_at(&mut self, p: &PointTotalSpace) -> Result<EpsilonEstimate> {
        let (r, x2, ln_weight, tau) = self.point_data(p)?;
        let mut sum = CompensatedSum::new();
        let mut prev = f64::INFINITY;
        let mut excluded = 0;
        let mut l = 0u32;
        let mut tail_bound = 0.0;
        loop {
            let (block, ex) = self.block(&r, x2, ln_weight, l)?;
            excluded += ex;
            sum.add(block);
            let total = sum.value();
            if x2 == 0.0 {
                break;
            }
            if l > 0 && block < prev && block <= TAIL_TOL * total {
                let rho = block / prev;
                tail_bound = if rho < 1.0 { block * rho / (1.0 - rho) } else { f64::INFINITY };
                break;
            }
            if l >= self.spec.l_max {
                return Err(Error::Truncation(format!(
                    "epsilon blocks still at {:e} of the total at l_max = {}",
                    block / total,
                    self.spec.l_max
                )));
            }
            prev = block;
            l += 1;
        }
        let value = sum.value();
        Ok(EpsilonEstimate {
            z: p.z.iter().map(|c| (c.re, c.im)).collect(),
            xi: (p.xi.re, p.xi.im),
            tau,
            alpha: self.spec.alpha,
            value,
            l_used: l,
            tail_bound,
            quad_tol: QUAD_TOL,
            excluded,
        })
    }
}

pub fn monomial_norm(spec: &HilbertBasisSpec, table: &MomentumTable, m: &[u32], l: u32) -> Result<f64> {
    Ok(Quantization::new(spec.clone(), table)?.log_norm(m, l)?.exp())
}

pub fn epsilon_at(spec: &HilbertBasisSpec, table: &MomentumTable, p: &PointTotalSpace) -> Result<EpsilonEstimate> {
    Quantization::new(spec.clone(), table)?.epsilon_at(p)
}

/// A probe point given by momentum and base coordinate (`arg xi = 0`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Probe {
    pub tau: f64,
    pub z: Vec<(f64, f64)>,
}

impl Probe {
    pub fn new(tau: f64, z: Vec<(f64, f64)>) -> Self {
        Probe { tau, z }
    }

    pub fn point(&self, family: &Family, table: &MomentumTable) -> Result<PointTotalSpace> {
        let z = self.z.iter().map(|&(a, b)| num_complex::Complex64::new(a, b)).collect();
        point_at_tau(family, table, self.tau, z, 0.0)
    }
}

/// `eps` at each probe for each `alpha`, rows indexed like `alphas`.
pub fn epsilon_grid(family: Family, table: &MomentumTable, alphas: &[f64], probes: &[Probe], bound_offset: i64) -> Result<Vec<Vec<EpsilonEstimate>>> {
    let points: Vec<PointTotalSpace> = probes.iter().map(|p| p.point(&family, table)).collect::<Result<_>>()?;
    alphas
        .iter()
        .map(|&a| {
            let spec = HilbertBasisSpec::new(family, a)?.with_bound_offset(bound_offset);
            let mut q = Quantization::new(spec, table)?;
            points.iter().map(|p| q.epsilon_at(p)).collect()
        })
        .collect()
}

/// `(max - min) / mean` of the values.
pub fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (max - min) / mean
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproximationRow {
    pub alpha: f64,
    pub max_deviation: f64,
}

/// `max_probe |eps / (C alpha^(n+1)) - 1|` per `alpha`, with `C = pi^-(n+1)`.
pub fn approximation_table(family: Family, table: &MomentumTable, alphas: &[f64], probes: &[Probe]) -> Result<Vec<ApproximationRow>> {
    let dim = family.dim() as i32;
    let c = std::f64::consts::PI.powi(-dim);
    let grid = epsilon_grid(family, table, alphas, probes, 0)?;
    Ok(alphas
        .iter()
        .zip(grid)
        .map(|(&alpha, row)| ApproximationRow {
            alpha,
            max_deviation: row.iter().map(|e| (e.value / (c * alpha.powi(dim)) - 1.0).abs()).fold(0.0, f64::max),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisRuleReport {
    pub alpha: f64,
    pub spread: f64,
    pub spread_widened: f64,
    /// Spread with the bound lowered to `2 alpha + k l`.
    pub spread_halved: f64,
    /// Divergent members dropped from the widened basis, summed over probes.
    pub excluded_widened: usize,
    pub widened_ratio: f64,
    pub halved_ratio: f64,
}

/// Constancy of `eps` on `O(-1)` under the degree bound, the bound widened by
/// one, and the bound lowered to `2 alpha + k l`.
pub fn basis_rule_check(table: &MomentumTable, alpha: f64, probes: &[Probe]) -> Result<BasisRuleReport> {
    let family = Family::OMinusK { k: 1 };
    let run = |offset| -> Result<(f64, usize)> {
        let rows = epsilon_grid(family, table, &[alpha], probes, offset)?;
        let vals: Vec<f64> = rows[0].iter().map(|e| e.value).collect();
        Ok((relative_spread(&vals), rows[0].iter().map(|e| e.excluded).sum()))
    };
    let (spread, _) = run(0)?;
    let (spread_widened, excluded_widened) = run(1)?;
    let (spread_halved, _) = run(-((2.0 * alpha).round() as i64))?;
    let floor = f64::EPSILON;
    Ok(BasisRuleReport {
        alpha,
        spread,
        spread_widened,
        spread_halved,
        excluded_widened,
        widened_ratio: spread_widened / spread.max(floor),
        halved_ratio: spread_halved / spread.max(floor),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FinitenessReport {
    pub family: String,
    pub alpha: f64,
    /// Threshold quoted for the integrability argument.
    pub documented_threshold: f64,
    /// Slope of the log-integrand of the base factor in `ln r` at large `r`.
    pub base_tail_slope: f64,
    /// Slope of the log-integrand of the fibre factor in `ln tau` near the table end.
    pub fibre_tail_slope: f64,
    pub finite: bool,
    pub log_norm: Option<f64>,
}

/// Convergence of `||1||^2` read from the tail exponents of both factors.
pub fn finiteness_scan(family: Family, alpha: f64, table: &MomentumTable) -> Result<FinitenessReport> {
    family.validate()?;
    let base = family.base();
    let documented_threshold = match family {
        Family::Flat { n, .. } => n as f64 / 4.0,
        Family::OMinusK { .. } => 0.25,
    };
    let slope = |g: &dyn Fn(f64) -> f64, v: f64| (g(v + 0.5) - g(v - 0.5)) / 1.0;
    let base_tail_slope = match family {
        Family::OMinusK { .. } => slope(&|v: f64| v - (4.0 * alpha + 2.0) * ln1p_exp_over_4(v), 60.0),
        Family::Flat { .. } => slope(&|v: f64| v - alpha * v.exp(), 5.0),
    };
    let v_end = (table.tau_max / 2.0).ln();
    let fibre = |v: f64| -> f64 {
        let tau = v.exp();
        match table.f_of_tau(tau) {
            Ok(f) => v - 4.0 * alpha * f + (1.0 - base.beta * tau).powi(base.n as i32).ln(),
            Err(_) => f64::NAN,
        }
    };
    let fibre_tail_slope = slope(&fibre, v_end);
    let finite = base_tail_slope < 0.0 && fibre_tail_slope < 0.0;
    let log_norm = if finite {
        let spec = HilbertBasisSpec { family, alpha, l_max: 0, bound_offset: 0, weight: Weight::Metric };
        let mut q = Quantization { spec, table, ln_fibre: Vec::new() };
        Some(q.log_norm(&vec![0; base.n as usize], 0)?)
    } else {
        None
    };
    Ok(FinitenessReport { family: family.label(), alpha, documented_threshold, base_tail_slope, fibre_tail_slope, finite, log_norm })
}
