//! Truncated Taylor arithmetic in one variable (`Jet`) and in a
//! holomorphic/antiholomorphic pair (`BiJet`).
//!
//! Coefficients are stored divided: `c[m] = f^(m)(x0) / m!`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_ORDER: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S: Scalar = f64> {
    c: Vec<S>,
}

pub fn factorial(m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, k| acc * k as f64)
}

fn check_finite<S: Scalar>(c: &[S]) -> Result<()> {
    if c.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("non-finite jet coefficient".into()))
    }
}

impl<S: Scalar> Jet<S> {
    /// Checked constructor: `1..=MAX_ORDER+1` finite coefficients.
    pub fn new(coeffs: Vec<S>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_ORDER + 1 {
            return Err(Error::Contract(format!(
                "jet order must lie in 0..={MAX_ORDER}, got {} coefficients",
                coeffs.len()
            )));
        }
        check_finite(&coeffs)?;
        Ok(Jet { c: coeffs })
    }

    /// Unchecked constructor for internal intermediates.
    pub(crate) fn from_vec(c: Vec<S>) -> Self {
        debug_assert!(!c.is_empty());
        Jet { c }
    }

    pub fn constant(v: S, order: usize) -> Self {
        let mut c = vec![S::zero(); order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded at `x0`.
    pub fn variable(x0: S, order: usize) -> Self {
        let mut c = vec![S::zero(); order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = S::one();
        }
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.c
    }

    pub fn value(&self) -> S {
        self.c[0]
    }

    pub fn coeff(&self, m: usize) -> S {
        self.c.get(m).copied().unwrap_or_else(S::zero)
    }

    /// The raw derivative `f^(m)(x0) = m! c[m]`.
    pub fn derivative_value(&self, m: usize) -> S {
        self.coeff(m) * S::from_f64(factorial(m))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.c.clone();
        c.resize(order + 1, S::zero());
        Jet { c }
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    pub fn scale(&self, s: S) -> Self {
        Jet { c: self.c.iter().map(|&x| x * s).collect() }
    }

    pub fn add_scalar(&self, s: S) -> Self {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    fn common(&self, other: &Self) -> usize {
        self.order().min(other.order())
    }

    pub fn mul_jet(&self, other: &Self) -> Self {
        let j = self.common(other);
        let mut c = vec![S::zero(); j + 1];
        for (m, cm) in c.iter_mut().enumerate() {
            let mut acc = S::zero();
            for k in 0..=m {
                acc += self.c[k] * other.c[m - k];
            }
            *cm = acc;
        }
        Jet { c }
    }

    pub fn recip(&self) -> Result<Self> {
        let a0 = self.c[0];
        if a0 == S::zero() {
            return Err(Error::SingularJet);
        }
        let j = self.order();
        let mut b = vec![S::zero(); j + 1];
        b[0] = S::one() / a0;
        for m in 1..=j {
            let mut acc = S::zero();
            for k in 1..=m {
                acc += self.c[k] * b[m - k];
            }
            b[m] = -acc / a0;
        }
        Ok(Jet { c: b })
    }

    pub fn div_jet(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_jet(&other.recip()?))
    }

    pub fn exp(&self) -> Self {
        let j = self.order();
        let mut b = vec![S::zero(); j + 1];
        b[0] = self.c[0].exp();
        for m in 1..=j {
            let mut acc = S::zero();
            for k in 1..=m {
                acc += S::from_f64(k as f64) * self.c[k] * b[m - k];
            }
            b[m] = acc / S::from_f64(m as f64);
        }
        Jet { c: b }
    }

    pub fn ln(&self) -> Result<Self> {
        let a0 = self.c[0];
        if !(a0 > S::zero()) {
            return Err(Error::Domain("log of a jet with nonpositive constant term".into()));
        }
        let j = self.order();
        let mut b = vec![S::zero(); j + 1];
        b[0] = a0.ln();
        for m in 1..=j {
            let mut acc = S::zero();
            for k in 1..m {
                acc += S::from_f64(k as f64) * b[k] * self.c[m - k];
            }
            b[m] = (self.c[m] - acc / S::from_f64(m as f64)) / a0;
        }
        Ok(Jet { c: b })
    }

    /// Real power `a^r`; needs a positive constant term.
    pub fn powf(&self, r: f64) -> Result<Self> {
        let a0 = self.c[0];
        if !(a0 > S::zero()) {
            return Err(Error::Domain("power of a jet with nonpositive constant term".into()));
        }
        let rs = S::from_f64(r);
        let j = self.order();
        let mut b = vec![S::zero(); j + 1];
        b[0] = (rs * a0.ln()).exp();
        for m in 1..=j {
            let mut acc = S::zero();
            for k in 1..=m {
                acc += (rs * S::from_f64(k as f64) - S::from_f64((m - k) as f64)) * self.c[k] * b[m - k];
            }
            b[m] = acc / (S::from_f64(m as f64) * a0);
        }
        Ok(Jet { c: b })
    }

    /// Integer power by repeated multiplication; negative powers go through `recip`.
    pub fn powi(&self, p: i32) -> Result<Self> {
        let base = if p < 0 { self.recip()? } else { self.clone() };
        let mut out = Jet::constant(S::one(), self.order());
        let mut sq = base;
        let mut e = p.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul_jet(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_jet(&sq);
            }
        }
        Ok(out)
    }

    /// d/dx, one order lower.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Jet::constant(S::zero(), 0);
        }
        Jet {
            c: (1..=self.order()).map(|m| self.c[m] * S::from_f64(m as f64)).collect(),
        }
    }

    /// Antiderivative with value `c0` at the expansion point, one order higher.
    pub fn integral(&self, c0: S) -> Self {
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(c0);
        for (m, &x) in self.c.iter().enumerate() {
            c.push(x / S::from_f64((m + 1) as f64));
        }
        Jet { c }
    }

    /// Evaluate the truncated polynomial at displacement `h`.
    pub fn eval(&self, h: S) -> S {
        self.c.iter().rev().fold(S::zero(), |acc, &x| acc * h + x)
    }

    /// `outer(inner(x))`, with `outer` expanded at `inner`'s value.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if outer.order() < inner.order() {
            return Err(Error::Contract(format!(
                "outer jet order {} below inner order {}",
                outer.order(),
                inner.order()
            )));
        }
        let j = inner.order();
        let mut d = inner.clone();
        d.c[0] = S::zero();
        let mut res = Jet::constant(outer.c[j], j);
        for m in (0..j).rev() {
            res = res.mul_jet(&d).add_scalar(outer.c[m]);
        }
        Ok(res)
    }

    /// Jet of the inverse function at `self.value()`, given the preimage `x0`.
    pub fn revert(&self, x0: S) -> Result<Self> {
        let j = self.order();
        if j == 0 {
            return Ok(Jet::constant(x0, 0));
        }
        let a1 = self.c[1];
        if a1 == S::zero() {
            return Err(Error::SingularJet);
        }
        let dy = Jet::variable(S::zero(), j);
        let mut dx = dy.scale(S::one() / a1);
        for _ in 1..j {
            let mut higher = self.clone();
            higher.c[0] = S::zero();
            higher.c[1] = S::zero();
            let h = Jet::compose(&higher, &dx)?;
            dx = (&dy - &h).scale(S::one() / a1);
        }
        dx.c[0] = x0;
        Ok(dx)
    }
}

impl<'a, S: Scalar> Add<&'a Jet<S>> for &'a Jet<S> {
    type Output = Jet<S>;
    fn add(self, o: &Jet<S>) -> Jet<S> {
        let j = self.common(o);
        Jet { c: (0..=j).map(|m| self.c[m] + o.c[m]).collect() }
    }
}

impl<'a, S: Scalar> Sub<&'a Jet<S>> for &'a Jet<S> {
    type Output = Jet<S>;
    fn sub(self, o: &Jet<S>) -> Jet<S> {
        let j = self.common(o);
        Jet { c: (0..=j).map(|m| self.c[m] - o.c[m]).collect() }
    }
}

impl<'a, S: Scalar> Mul<&'a Jet<S>> for &'a Jet<S> {
    type Output = Jet<S>;
    fn mul(self, o: &Jet<S>) -> Jet<S> {
        self.mul_jet(o)
    }
}

impl<S: Scalar> Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        Jet { c: self.c.iter().map(|&x| -x).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Div,
}

/// Checked binary arithmetic: orders must match.
pub fn jet_arith<S: Scalar>(a: &Jet<S>, b: &Jet<S>, op: ArithOp) -> Result<Jet<S>> {
    if a.order() != b.order() {
        return Err(Error::Contract(format!("jet orders differ: {} vs {}", a.order(), b.order())));
    }
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.div_jet(b),
    }
}

/// Jet in `(w, wbar)` with independent truncation `a, b <= order`;
/// `c[a][b]` is `d^a dbar^b f / (a! b!)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiJet<S: Scalar = f64> {
    order: usize,
    c: Vec<S>,
}

impl<S: Scalar> BiJet<S> {
    pub fn zero(order: usize) -> Self {
        BiJet { order, c: vec![S::zero(); (order + 1) * (order + 1)] }
    }

    pub fn constant(v: S, order: usize) -> Self {
        let mut z = Self::zero(order);
        z.c[0] = v;
        z
    }

    pub fn from_coeffs(order: usize, c: Vec<S>) -> Result<Self> {
        if c.len() != (order + 1) * (order + 1) {
            return Err(Error::Contract("bijet coefficient array has wrong size".into()));
        }
        if order > MAX_ORDER {
            return Err(Error::Contract(format!("bijet order above {MAX_ORDER}")));
        }
        check_finite(&c)?;
        Ok(BiJet { order, c })
    }

    /// A function of `w` only.
    pub fn holomorphic(j: &Jet<S>) -> Self {
        let mut z = Self::zero(j.order());
        for a in 0..=j.order() {
            z.set(a, 0, j.coeff(a));
        }
        z
    }

    /// A function of `wbar` only.
    pub fn antiholomorphic(j: &Jet<S>) -> Self {
        let mut z = Self::zero(j.order());
        for b in 0..=j.order() {
            z.set(0, b, j.coeff(b));
        }
        z
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn idx(&self, a: usize, b: usize) -> usize {
        a * (self.order + 1) + b
    }

    pub fn get(&self, a: usize, b: usize) -> S {
        self.c[self.idx(a, b)]
    }

    pub fn set(&mut self, a: usize, b: usize, v: S) {
        let i = self.idx(a, b);
        self.c[i] = v;
    }

    pub fn value(&self) -> S {
        self.c[0]
    }

    pub fn derivative_value(&self, a: usize, b: usize) -> S {
        self.get(a, b) * S::from_f64(factorial(a) * factorial(b))
    }

    pub fn scale(&self, s: S) -> Self {
        BiJet { order: self.order, c: self.c.iter().map(|&x| x * s).collect() }
    }

    pub fn add_scalar(&self, s: S) -> Self {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    /// Largest `|c[a][b] - c[b][a]|` relative to the largest entry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut scale = 0.0f64;
        let mut defect = 0.0f64;
        for a in 0..=self.order {
            for b in 0..=self.order {
                scale = scale.max(self.get(a, b).to_f64().abs());
                defect = defect.max((self.get(a, b) - self.get(b, a)).to_f64().abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    pub fn mul_bijet(&self, o: &Self) -> Self {
        let j = self.order.min(o.order);
        let mut out = Self::zero(j);
        for a in 0..=j {
            for b in 0..=j {
                let mut acc = S::zero();
                for i in 0..=a {
                    for k in 0..=b {
                        acc += self.get(i, k) * o.get(a - i, b - k);
                    }
                }
                out.set(a, b, acc);
            }
        }
        out
    }

    /// `outer(inner)`; the outer jet must carry order `2 * inner.order()`
    /// because mixed monomials reach total degree `2J`.
    pub fn compose(outer: &Jet<S>, inner: &Self) -> Result<Self> {
        let need = 2 * inner.order;
        if outer.order() < need {
            return Err(Error::Contract(format!(
                "outer jet order {} below the {} needed for a bijet of order {}",
                outer.order(),
                need,
                inner.order
            )));
        }
        let mut d = inner.clone();
        d.c[0] = S::zero();
        let mut res = Self::constant(outer.coeff(need), inner.order);
        for m in (0..need).rev() {
            res = res.mul_bijet(&d).add_scalar(outer.coeff(m));
        }
        Ok(res)
    }

    pub fn exp(&self) -> Self {
        let series = Jet::variable(self.value(), 2 * self.order).exp();
        BiJet::compose(&series, self).expect("series order matches")
    }

    pub fn ln(&self) -> Result<Self> {
        let series = Jet::variable(self.value(), 2 * self.order).ln()?;
        BiJet::compose(&series, self)
    }

    pub fn powf(&self, r: f64) -> Result<Self> {
        let series = Jet::variable(self.value(), 2 * self.order).powf(r)?;
        BiJet::compose(&series, self)
    }

    pub fn recip(&self) -> Result<Self> {
        let series = Jet::variable(self.value(), 2 * self.order).recip()?;
        BiJet::compose(&series, self)
    }

    pub fn div_bijet(&self, o: &Self) -> Result<Self> {
        Ok(self.mul_bijet(&o.recip()?))
    }
}

impl<'a, S: Scalar> Add<&'a BiJet<S>> for &'a BiJet<S> {
    type Output = BiJet<S>;
    fn add(self, o: &BiJet<S>) -> BiJet<S> {
        let j = self.order.min(o.order);
        let mut out = BiJet::zero(j);
        for a in 0..=j {
            for b in 0..=j {
                out.set(a, b, self.get(a, b) + o.get(a, b));
            }
        }
        out
    }
}

impl<'a, S: Scalar> Sub<&'a BiJet<S>> for &'a BiJet<S> {
    type Output = BiJet<S>;
    fn sub(self, o: &BiJet<S>) -> BiJet<S> {
        self + &o.scale(-S::one())
    }
}

impl<'a, S: Scalar> Mul<&'a BiJet<S>> for &'a BiJet<S> {
    type Output = BiJet<S>;
    fn mul(self, o: &BiJet<S>) -> BiJet<S> {
        self.mul_bijet(o)
    }
}

/// Checked binary arithmetic on bijets: orders must match.
pub fn bijet_arith<S: Scalar>(a: &BiJet<S>, b: &BiJet<S>, op: ArithOp) -> Result<BiJet<S>> {
    if a.order() != b.order() {
        return Err(Error::Contract(format!("bijet orders differ: {} vs {}", a.order(), b.order())));
    }
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.div_bijet(b),
    }
}
