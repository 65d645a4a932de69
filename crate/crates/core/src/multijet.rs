//! Total-degree truncated Taylor polynomials in several variables with
//! complex coefficients. Used with `z_i` and `conj(z_i)` as independent
//! variables, so mixed partials `d_i dbar_j` are plain coefficients.
//!
//! Monomials are stored in graded order, so a jet of lower degree is a
//! prefix of the coefficient vector of a higher-degree one.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jets::Jet;

pub const MAX_DEGREE: usize = 6;
pub const MAX_VARS: usize = 8;

#[derive(Debug)]
pub struct Basis {
    nvars: usize,
    exps: Vec<[u8; MAX_VARS]>,
    index: HashMap<[u8; MAX_VARS], usize>,
    /// `count[d]` = number of monomials of degree `<= d`.
    count: Vec<usize>,
    /// `(i, j, k)` with `x^i x^j = x^k`, sorted by degree of `k`.
    mul: Vec<(u32, u32, u32)>,
    /// `mul_end[d]` = number of triples whose product has degree `<= d`.
    mul_end: Vec<usize>,
    /// Per variable: `(src, dst, factor)` for `d/dx_v x^src = factor x^dst`.
    deriv: Vec<Vec<(u32, u32, f64)>>,
}

fn degree_of(e: &[u8; MAX_VARS]) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

impl Basis {
    fn build(nvars: usize) -> Basis {
        let mut exps: Vec<[u8; MAX_VARS]> = Vec::new();
        let mut count = Vec::new();
        for d in 0..=MAX_DEGREE {
            let mut cur = [0u8; MAX_VARS];
            push_degree(nvars, 0, d, &mut cur, &mut exps);
            count.push(exps.len());
        }
        let index: HashMap<[u8; MAX_VARS], usize> = exps.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut mul = Vec::new();
        let mut mul_end = Vec::new();
        for d in 0..=MAX_DEGREE {
            for (i, ei) in exps.iter().enumerate() {
                let di = degree_of(ei);
                if di > d {
                    break;
                }
                for (j, ej) in exps.iter().enumerate().take(count[d - di]) {
                    if di + degree_of(ej) != d {
                        continue;
                    }
                    let mut ek = [0u8; MAX_VARS];
                    for v in 0..MAX_VARS {
                        ek[v] = ei[v] + ej[v];
                    }
                    mul.push((i as u32, j as u32, index[&ek] as u32));
                }
            }
            mul_end.push(mul.len());
        }
        let mut deriv = vec![Vec::new(); nvars];
        for (src, e) in exps.iter().enumerate() {
            for (v, dv) in deriv.iter_mut().enumerate() {
                if e[v] > 0 {
                    let mut d = *e;
                    d[v] -= 1;
                    dv.push((src as u32, index[&d] as u32, e[v] as f64));
                }
            }
        }
        Basis { nvars, exps, index, count, mul, mul_end, deriv }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self, degree: usize) -> usize {
        self.count[degree]
    }
}

fn push_degree(nvars: usize, v: usize, left: usize, cur: &mut [u8; MAX_VARS], out: &mut Vec<[u8; MAX_VARS]>) {
    if v + 1 == nvars {
        cur[v] = left as u8;
        out.push(*cur);
        cur[v] = 0;
        return;
    }
    for a in (0..=left).rev() {
        cur[v] = a as u8;
        push_degree(nvars, v + 1, left - a, cur, out);
    }
    cur[v] = 0;
}

fn basis(nvars: usize) -> Arc<Basis> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Basis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry(nvars).or_insert_with(|| Arc::new(Basis::build(nvars))).clone()
}

#[derive(Clone, Debug)]
pub struct MultiJet {
    basis: Arc<Basis>,
    degree: usize,
    c: Vec<Complex64>,
}

impl MultiJet {
    pub fn constant(nvars: usize, degree: usize, v: Complex64) -> Result<Self> {
        if nvars == 0 || nvars > MAX_VARS || degree > MAX_DEGREE {
            return Err(Error::Contract(format!(
                "multivariate jets support up to {MAX_VARS} variables and degree {MAX_DEGREE}"
            )));
        }
        let b = basis(nvars);
        let mut c = vec![Complex64::new(0.0, 0.0); b.len(degree)];
        c[0] = v;
        Ok(MultiJet { basis: b, degree, c })
    }

    /// `x0 + dx_var`.
    pub fn variable(nvars: usize, degree: usize, var: usize, x0: Complex64) -> Result<Self> {
        let mut j = Self::constant(nvars, degree, x0)?;
        if var >= nvars {
            return Err(Error::Contract("variable index out of range".into()));
        }
        if degree >= 1 {
            let mut e = [0u8; MAX_VARS];
            e[var] = 1;
            let i = j.basis.index[&e];
            j.c[i] = Complex64::new(1.0, 0.0);
        }
        Ok(j)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// Coefficient of the monomial with the given exponents (zero past the degree).
    pub fn coeff(&self, exps: &[u8]) -> Complex64 {
        let mut e = [0u8; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        match self.basis.index.get(&e) {
            Some(&i) if i < self.c.len() => self.c[i],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Coefficient of `dx_a` (first derivative).
    pub fn d1(&self, a: usize) -> Complex64 {
        let mut e = [0u8; MAX_VARS];
        e[a] += 1;
        self.coeff(&e[..self.basis.nvars])
    }

    /// Mixed second derivative `d_a d_b` at the point, `a != b`.
    pub fn d11(&self, a: usize, b: usize) -> Complex64 {
        debug_assert!(a != b);
        let mut e = [0u8; MAX_VARS];
        e[a] += 1;
        e[b] += 1;
        self.coeff(&e[..self.basis.nvars])
    }

    fn zeros_like(&self, degree: usize) -> MultiJet {
        MultiJet { basis: self.basis.clone(), degree, c: vec![Complex64::new(0.0, 0.0); self.basis.len(degree)] }
    }

    pub fn add(&self, o: &MultiJet) -> MultiJet {
        let d = self.degree.min(o.degree);
        let mut out = self.zeros_like(d);
        for (i, x) in out.c.iter_mut().enumerate() {
            *x = self.c[i] + o.c[i];
        }
        out
    }

    pub fn sub(&self, o: &MultiJet) -> MultiJet {
        let d = self.degree.min(o.degree);
        let mut out = self.zeros_like(d);
        for (i, x) in out.c.iter_mut().enumerate() {
            *x = self.c[i] - o.c[i];
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> MultiJet {
        MultiJet { basis: self.basis.clone(), degree: self.degree, c: self.c.iter().map(|&x| x * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> MultiJet {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add_scalar(&self, s: Complex64) -> MultiJet {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    pub fn mul(&self, o: &MultiJet) -> MultiJet {
        debug_assert!(Arc::ptr_eq(&self.basis, &o.basis));
        let d = self.degree.min(o.degree);
        let mut out = self.zeros_like(d);
        for &(i, j, k) in &self.basis.mul[..self.basis.mul_end[d]] {
            out.c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        out
    }

    /// `sum_m series[m] (self - self.value())^m`.
    pub fn compose(&self, series: &[Complex64]) -> MultiJet {
        let mut delta = self.clone();
        delta.c[0] = Complex64::new(0.0, 0.0);
        let top = series.len().min(self.degree + 1);
        let mut res = self.zeros_like(self.degree);
        if top == 0 {
            return res;
        }
        res.c[0] = series[top - 1];
        for m in (0..top - 1).rev() {
            res = res.mul(&delta).add_scalar(series[m]);
        }
        res
    }

    /// Compose with a real univariate jet expanded at `Re(self.value())`.
    pub fn compose_jet(&self, outer: &Jet) -> Result<MultiJet> {
        if outer.order() < self.degree {
            return Err(Error::Contract(format!(
                "univariate jet order {} below multivariate degree {}",
                outer.order(),
                self.degree
            )));
        }
        let series: Vec<Complex64> = outer.coeffs().iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Ok(self.compose(&series))
    }

    pub fn recip(&self) -> Result<MultiJet> {
        let a0 = self.value();
        if a0.norm() == 0.0 {
            return Err(Error::SingularJet);
        }
        let inv = 1.0 / a0;
        let mut series = Vec::with_capacity(self.degree + 1);
        let mut p = inv;
        for _ in 0..=self.degree {
            series.push(p);
            p *= -inv;
        }
        Ok(self.compose(&series))
    }

    pub fn ln(&self) -> Result<MultiJet> {
        let a0 = self.value();
        if a0.norm() == 0.0 {
            return Err(Error::Domain("log of a multivariate jet with zero constant term".into()));
        }
        let inv = 1.0 / a0;
        let mut series = vec![a0.ln()];
        let mut p = inv;
        for m in 1..=self.degree {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            series.push(p * sign / m as f64);
            p *= inv;
        }
        Ok(self.compose(&series))
    }

    pub fn exp(&self) -> MultiJet {
        let e0 = self.value().exp();
        let mut series = Vec::with_capacity(self.degree + 1);
        let mut f = 1.0;
        for m in 0..=self.degree {
            if m > 0 {
                f *= m as f64;
            }
            series.push(e0 / f);
        }
        self.compose(&series)
    }

    /// Partial derivative in variable `v`, one degree lower.
    pub fn derivative(&self, v: usize) -> MultiJet {
        if self.degree == 0 {
            return self.zeros_like(0);
        }
        let d = self.degree - 1;
        let mut out = self.zeros_like(d);
        let n = self.c.len();
        for &(src, dst, fac) in &self.basis.deriv[v] {
            if (src as usize) < n {
                out.c[dst as usize] += self.c[src as usize] * fac;
            }
        }
        out
    }

    /// Restriction to the line `x0 + h dx`: coefficient of `h^m` for each `m`.
    pub fn along(&self, dx: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.degree + 1];
        for (i, e) in self.basis.exps[..self.c.len()].iter().enumerate() {
            let mut term = self.c[i];
            for (v, &p) in e.iter().enumerate().take(self.basis.nvars) {
                if p > 0 {
                    term *= dx[v].powu(p as u32);
                }
            }
            out[degree_of(e)] += term;
        }
        out
    }

    /// Evaluate the truncated polynomial at displacement `dx`.
    pub fn eval(&self, dx: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, e) in self.basis.exps[..self.c.len()].iter().enumerate() {
            let mut term = self.c[i];
            for (v, &p) in e.iter().enumerate().take(self.basis.nvars) {
                if p > 0 {
                    term *= dx[v].powu(p as u32);
                }
            }
            acc += term;
        }
        acc
    }
}
