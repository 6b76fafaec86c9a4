//! Numerical building blocks shared by the analysis modules: double-double
//! arithmetic for fractional parts at large scale, compensated summation,
//! adaptive Gauss–Kronrod quadrature, and Euler–Maclaurin tail sums.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, AddAssign, Sub};

use crate::error::{Error, Result};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Unevaluated sum `hi + lo` of two doubles, giving roughly 106 bits of mantissa.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let (s, f) = two_sum(self.hi, -p);
        let f = f - e + self.lo;
        let q2 = (s + f) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo }
    }

    pub fn floor(self) -> Self {
        let fh = self.hi.floor();
        if fh == self.hi {
            let (hi, lo) = quick_two_sum(fh, self.lo.floor());
            DoubleDouble { hi, lo }
        } else {
            DoubleDouble { hi: fh, lo: 0.0 }
        }
    }

    /// Splits into `(floor, fractional part)`; the floor is an exact integer
    /// whenever it is below 2^53.
    pub fn floor_fract(self) -> (f64, f64) {
        let fl = self.floor();
        let frac = (self - fl).to_f64();
        // frac can round up to exactly 1.0 when lo is a tiny negative number
        if frac >= 1.0 {
            (fl.to_f64() + 1.0, 0.0)
        } else {
            (fl.to_f64(), frac.max(0.0))
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(hi: f64) -> Self {
        DoubleDouble { hi, lo: 0.0 }
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;

    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = DoubleDouble;

    fn sub(self, rhs: Self) -> Self {
        self + DoubleDouble {
            hi: -rhs.hi,
            lo: -rhs.lo,
        }
    }
}

/// Kahan–Babuška–Neumaier running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for CompensatedSum {
    fn add_assign(&mut self, rhs: f64) {
        let t = self.sum + rhs;
        if self.sum.abs() >= rhs.abs() {
            self.compensation += (self.sum - t) + rhs;
        } else {
            self.compensation += (rhs - t) + self.sum;
        }
        self.sum = t;
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc += v;
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

const MAX_SEGMENTS: usize = 4000;

/// Globally adaptive Gauss–Kronrod (7/15) integration over a finite interval.
///
/// The segment with the largest error estimate is bisected until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            converged: true,
        });
    }
    let (value, error) = gauss_kronrod_15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut segments = 1;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Evaluation(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        if segments >= MAX_SEGMENTS {
            return Ok(Quadrature {
                value: total,
                error: total_err,
                converged: false,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gauss_kronrod_15(&f, worst.a, mid);
        let (rv, re) = gauss_kronrod_15(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        segments += 1;
    }
    // Re-sum to shed the drift of the incremental updates.
    let value = compensated_sum(heap.iter().map(|s| s.value));
    let error = heap.iter().map(|s| s.error).sum();
    Ok(Quadrature {
        value,
        error,
        converged: true,
    })
}

/// `∫_x^∞ f(u) du` for `f` regularly varying at infinity with index `rho < -1`.
///
/// Integrates `x·e^t·f(x·e^t)` over `t ∈ [0, T]`, which decays like
/// `e^{(rho+1)t}`, and closes with the power-law tail `U·f(U)/(-(rho+1))`
/// at `U = x·e^T`. `T` is chosen so the spliced part is below `1e-14` of the
/// total for an exact power.
pub fn integrate_tail<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    rho: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    if !(rho < -1.0) || !rho.is_finite() {
        return Err(Error::Argument(format!(
            "tail integral needs a finite index below -1, got {rho}"
        )));
    }
    if !(x > 0.0) {
        return Err(Error::Argument(format!(
            "tail integral needs x > 0, got {x}"
        )));
    }
    let decay = -(rho + 1.0);
    let span = (32.3 / decay).min(700.0 - x.ln()).max(1.0);
    let g = |t: f64| {
        let u = x * t.exp();
        u * f(u)
    };
    let mut q = integrate(g, 0.0, span, rel_tol, 0.0)?;
    let upper = x * span.exp();
    let splice = upper * f(upper) / decay;
    if !splice.is_finite() {
        return Err(Error::Evaluation(format!(
            "non-finite integrand at tail splice u = {upper:e}"
        )));
    }
    q.value += splice;
    Ok(q)
}

/// `Σ_{j ≥ k} g(j)` for a positive, eventually decreasing `g` regularly varying
/// with index `rho < -1`.
///
/// Sums 1024 terms directly, then closes with the Euler–Maclaurin formula
/// (integral, half end term, `B_2` and `B_4` corrections) at `K = k + 1024`.
/// Derivatives of `g` at `K` come from central differences.
pub fn euler_maclaurin_tail<G: Fn(f64) -> f64>(g: G, rho: f64, k: u64) -> Result<f64> {
    const DIRECT: u64 = 1024;
    let mut head = CompensatedSum::new();
    for j in k..k + DIRECT {
        head += g(j as f64);
    }
    let big_k = (k + DIRECT) as f64;
    let integral = integrate_tail(&g, big_k, rho, 1e-14)?;
    if !integral.converged {
        return Err(Error::numeric(
            "tail integral did not converge",
            head.value(),
        ));
    }
    let h1 = big_k * 1e-2;
    let d1 = (-g(big_k + 2.0 * h1) + 8.0 * g(big_k + h1) - 8.0 * g(big_k - h1)
        + g(big_k - 2.0 * h1))
        / (12.0 * h1);
    let h3 = big_k * 5e-2;
    let d3 = (g(big_k + 2.0 * h3) - 2.0 * g(big_k + h3) + 2.0 * g(big_k - h3)
        - g(big_k - 2.0 * h3))
        / (2.0 * h3 * h3 * h3);
    head += integral.value;
    head += 0.5 * g(big_k);
    head += -d1 / 12.0;
    head += d3 / 720.0;
    let total = head.value();
    if !total.is_finite() {
        return Err(Error::numeric("non-finite tail sum", total));
    }
    Ok(total)
}

// B_{2p} / (2p)! for p = 1..8
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
];

/// Hurwitz zeta `Σ_{n ≥ 0} (q + n)^{-s}` for `s > 1`, `q > 0`.
pub fn hurwitz_zeta(s: f64, q: f64) -> Result<f64> {
    if !(s > 1.0) || !(q > 0.0) {
        return Err(Error::Argument(format!(
            "hurwitz zeta needs s > 1 and q > 0, got s = {s}, q = {q}"
        )));
    }
    let shift = if q < 24.0 {
        (24.0 - q).ceil() as u64
    } else {
        0
    };
    let mut acc = CompensatedSum::new();
    for n in 0..shift {
        acc += (q + n as f64).powf(-s);
    }
    let a = q + shift as f64;
    acc += a.powf(1.0 - s) / (s - 1.0);
    acc += 0.5 * a.powf(-s);
    // rising factorial s (s+1) ... (s+2p-2) times a^{-s-2p+1}
    let mut rising = s;
    let mut power = a.powf(-s - 1.0);
    let inv_a2 = 1.0 / (a * a);
    for (p, &coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if p > 0 {
            let m = 2.0 * p as f64;
            rising *= (s + m - 1.0) * (s + m);
            power *= inv_a2;
        }
        acc += coef * rising * power;
    }
    Ok(acc.value())
}

/// Least-squares slope of `ys` against `xs`; `None` when `xs` has no spread.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= f64::EPSILON * n * mx.abs().max(1.0) {
        return None;
    }
    Some(sxy / sxx)
}

/// Rounds to 15 significant decimal digits (non-finite values pass through).
pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

/// Decimal text with at most 15 significant digits.
pub fn fmt_sig(v: f64) -> String {
    let r = round_sig(v);
    let a = r.abs();
    if r != 0.0 && a.is_finite() && !(1e-6..1e16).contains(&a) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}
