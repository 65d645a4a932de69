//! Gauss–Kronrod quadrature, adaptive subdivision and compensated sums.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RuleResult {
    pub value: f64,
    pub error: f64,
}

/// 21-point Kronrod rule with the embedded 10-point Gauss rule as error estimate.
pub fn gk21(f: impl Fn(f64) -> f64, a: f64, b: f64) -> RuleResult {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[10];
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * h;
    let resabs = resabs * h.abs();
    let resasc = resasc * h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    RuleResult { value, error: err }
}

/// Kronrod 21-point value of a complex integrand on a real interval.
pub(crate) fn gk21_complex(f: impl Fn(f64) -> num_complex::Complex64, a: f64, b: f64) -> num_complex::Complex64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = f(c) * WGK[10];
    for j in 0..10 {
        let dx = h * XGK[j];
        acc += (f(c - dx) + f(c + dx)) * WGK[j];
    }
    acc * h
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.partial_cmp(&o.error).unwrap_or(Ordering::Equal)
    }
}

#[derive(Clone, Debug)]
pub struct Adaptive {
    pub value: f64,
    pub error: f64,
    /// Final subintervals sorted by left endpoint.
    pub pieces: Vec<(f64, f64)>,
}

/// Globally adaptive bisection on the worst subinterval.
pub fn adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_pieces: usize) -> Result<Adaptive> {
    if a == b {
        return Ok(Adaptive { value: 0.0, error: 0.0, pieces: vec![(a, b)] });
    }
    let first = gk21(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: first.value, error: first.error });
    loop {
        let mut total = CompensatedSum::new();
        let mut err = 0.0;
        for p in heap.iter() {
            total.add(p.value);
            err += p.error;
        }
        let value = total.value();
        if !value.is_finite() {
            return Err(Error::Accuracy { achieved: f64::INFINITY, requested: abs_tol.max(rel_tol * value.abs()) });
        }
        let target = abs_tol.max(rel_tol * value.abs());
        if err <= target || heap.len() >= max_pieces {
            if err > target {
                return Err(Error::Accuracy { achieved: err, requested: target });
            }
            let mut pieces: Vec<(f64, f64)> = heap.iter().map(|p| (p.a, p.b)).collect();
            pieces.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
            return Ok(Adaptive { value, error: err, pieces });
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if m == worst.a || m == worst.b {
            return Err(Error::Accuracy { achieved: err, requested: target });
        }
        let l = gk21(&f, worst.a, m);
        let r = gk21(&f, m, worst.b);
        heap.push(Piece { a: worst.a, b: m, value: l.value, error: l.error });
        heap.push(Piece { a: m, b: worst.b, value: r.value, error: r.error });
    }
}

/// `ln ∫ exp(L(v)) dv` over the whole line for a unimodal log-integrand.
///
/// The window is grown outward from `v0` until `L` has dropped by `drop`
/// below its running maximum on both sides; `max_span` bounds the search
/// and its exhaustion is reported as a divergent integral.
pub fn log_integral_line(l: impl Fn(f64) -> f64, v0: f64, rel_tol: f64, max_span: f64) -> Result<f64> {
    const DROP: f64 = 46.0;
    let mut lmax = l(v0);
    if !lmax.is_finite() {
        return Err(Error::Domain(format!("log-integrand not finite at the start point {v0}")));
    }
    let mut ends = [v0, v0];
    for (side, dir) in [(0usize, -1.0f64), (1usize, 1.0f64)] {
        let mut v = v0;
        let mut lv = lmax;
        let mut h: f64 = 0.01;
        loop {
            let vn = v + dir * h;
            let ln = l(vn);
            if ln.is_nan() {
                return Err(Error::Domain(format!("log-integrand is NaN at {vn}")));
            }
            let slope = (ln - lv) / h;
            v = vn;
            lv = ln;
            if lv > lmax {
                lmax = lv;
            }
            if lv < lmax - DROP {
                break;
            }
            if (v - v0).abs() > max_span {
                return Err(Error::DivergentNorm(format!(
                    "integrand has not decayed within {max_span} log-units of the start (slope {slope:e})"
                )));
            }
            h = (0.5 / slope.abs().max(1e-12)).clamp(0.01, 0.5);
        }
        ends[side] = v;
    }
    let res = adaptive(|v| (l(v) - lmax).exp(), ends[0], ends[1], 0.0, rel_tol, 4000)?;
    Ok(lmax + res.value.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk21_is_exact_for_polynomials_up_to_degree_31() {
        let r = gk21(|x| x.powi(30) + 3.0 * x.powi(7), -1.0, 1.0);
        assert!((r.value - 2.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_sharp_peaks() {
        let r = adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 0.0, 1e-13, 2000).unwrap();
        let want = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - want).abs() <= 1e-12 * want);
        assert!(r.pieces.windows(2).all(|w| w[0].1 == w[1].0));
    }

    #[test]
    fn gamma_integral_on_log_line() {
        // ∫_0^∞ r^m e^{-c r} dr = m! / c^{m+1}, with r = e^v.
        for (m, c) in [(0u32, 1.0f64), (3, 2.5), (20, 0.7), (60, 11.0)] {
            let got = log_integral_line(|v| (m as f64 + 1.0) * v - c * v.exp(), ((m as f64 + 1.0) / c).ln(), 1e-13, 2000.0).unwrap();
            let want = libm::lgamma(m as f64 + 1.0) - (m as f64 + 1.0) * c.ln();
            assert!((got - want).abs() < 1e-12, "m={m}: {got} vs {want}");
        }
    }

    #[test]
    fn divergence_is_detected() {
        // r^{-1/2} on (0, ∞): L = v/2 grows without bound.
        let e = log_integral_line(|v| 0.5 * v, 0.0, 1e-10, 500.0);
        assert!(matches!(e, Err(Error::DivergentNorm(_))));
    }

    #[test]
    fn compensated_sum_is_exact_on_cancellation() {
        let mut s = CompensatedSum::new();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
