//! Dirichlet spectrum of a fractal string: exact counting, the Weyl term, the
//! packing defect `δ(x) = Σ {l_j x}` and the zeta-side constants of the second term.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{make_derived, DerivedFunctions, GaugeFunction};
use crate::numeric::{fmt_sig, CompensatedSum};
use crate::strings::{FractalString, Precision};

/// Head terms beyond this many are refused: the sum would not finish in desk time.
pub const MAX_HEAD_TERMS: u64 = 1 << 31;

/// `x = √λ/π`, the frequency scale at which `φ(λ) − N(λ) = δ(x)`.
pub fn frequency(lambda: f64) -> f64 {
    lambda.sqrt() / PI
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "λ must be positive and finite, got {lambda}"
        )))
    }
}

/// Terms `l_j x ≥ 1`: their floors and fractional parts.
struct Head {
    floors: u64,
    fract: f64,
    terms: u64,
}

// Walks groups while `⌊l x⌋ ≥ 1`. Splitting on the computed floor rather than on
// `J(1/x)` keeps exact ties (`l x = 1`) on the same side for `N` and `δ`.
fn scan_head(string: &FractalString, x: f64, precision: Precision) -> Result<Head> {
    // ties aside, the head is the first J(1/x) terms; refuse before walking them
    if string.count_exceeding(1.0 / x)? > MAX_HEAD_TERMS {
        return Err(Error::Range(format!(
            "more than {MAX_HEAD_TERMS} terms exceed 1/x at x = {x}"
        )));
    }
    let mut floors = 0u64;
    let mut fract = CompensatedSum::new();
    let mut terms = 0u64;
    for group in string.groups() {
        let (fl, fr) = FractalString::scaled(&group, x, precision).floor_fract();
        if fl < 1.0 {
            break;
        }
        if fl >= 2f64.powi(63) {
            return Err(Error::Range(format!("⌊l x⌋ overflows at x = {x}")));
        }
        let add = (fl as u64)
            .checked_mul(group.multiplicity)
            .and_then(|v| v.checked_add(floors))
            .ok_or_else(|| Error::Range(format!("N overflows at x = {x}")))?;
        floors = add;
        fract += fr * group.multiplicity as f64;
        terms += group.multiplicity;
        if terms > MAX_HEAD_TERMS {
            return Err(Error::Range(format!(
                "more than {MAX_HEAD_TERMS} terms exceed 1/x at x = {x}"
            )));
        }
    }
    Ok(Head {
        floors,
        fract: fract.value(),
        terms,
    })
}

/// `N(λ) = Σ_j ⌊l_j √λ/π⌋`.
pub fn eigen_count(string: &FractalString, lambda: f64) -> Result<u64> {
    eigen_count_with(string, lambda, Precision::default())
}

pub fn eigen_count_with(string: &FractalString, lambda: f64, precision: Precision) -> Result<u64> {
    check_lambda(lambda)?;
    Ok(scan_head(string, frequency(lambda), precision)?.floors)
}

/// `φ(λ) = |Ω|·√λ/π`.
pub fn weyl_term(string: &FractalString, lambda: f64) -> f64 {
    string.total_length() * frequency(lambda)
}

/// `δ(x) = Σ_{l_j x ≥ 1} {l_j x} + x·Σ_{l_j x < 1} l_j`.
pub fn packing_defect(string: &FractalString, x: f64) -> Result<f64> {
    packing_defect_with(string, x, Precision::default())
}

pub fn packing_defect_with(string: &FractalString, x: f64, precision: Precision) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Argument(format!("δ(x) needs x > 0, got {x}")));
    }
    let head = scan_head(string, x, precision)?;
    Ok(head.fract + x * string.tail_after(head.terms)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub max_abs: f64,
    /// `max |(φ−N) − δ| / max(1, φ)`.
    pub max_scaled: f64,
    pub worst_lambda: f64,
}

/// Largest violation of `φ(λ) − N(λ) = δ(√λ/π)` over `lambdas`.
pub fn remainder_identity_check(
    string: &FractalString,
    lambdas: &[f64],
) -> Result<IdentityResidual> {
    remainder_identity_check_with(string, lambdas, Precision::default())
}

pub fn remainder_identity_check_with(
    string: &FractalString,
    lambdas: &[f64],
    precision: Precision,
) -> Result<IdentityResidual> {
    let mut out = IdentityResidual {
        max_abs: 0.0,
        max_scaled: 0.0,
        worst_lambda: f64::NAN,
    };
    for &lambda in lambdas {
        check_lambda(lambda)?;
        let phi = weyl_term(string, lambda);
        let n = eigen_count_with(string, lambda, precision)?;
        let delta = packing_defect_with(string, frequency(lambda), precision)?;
        let res = ((phi - n as f64) - delta).abs();
        let scaled = res / phi.max(1.0);
        out.max_abs = out.max_abs.max(res);
        if !(scaled <= out.max_scaled) {
            out.max_scaled = scaled;
            out.worst_lambda = lambda;
        }
    }
    Ok(out)
}

/// `ζ(s)` on `0 < s < 1` from the Borwein-accelerated eta series.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Argument(format!(
            "ζ(s) is provided for 0 < s < 1, got {s}"
        )));
    }
    Ok(eta(s) / (1.0 - 2f64.powf(1.0 - s)))
}

/// Dirichlet eta, Borwein's algorithm 2 with 40 terms (error ~ 5.8^{-40}).
pub(crate) fn eta(s: f64) -> f64 {
    const N: usize = 40;
    let n = N as f64;
    let mut d = [0.0f64; N + 1];
    let mut term = 1.0;
    let mut acc = 1.0;
    d[0] = 1.0;
    #[allow(clippy::needless_range_loop)]
    for i in 1..=N {
        let fi = i as f64;
        term *= 4.0 * (n + fi - 1.0) * (n - fi + 1.0) / (2.0 * fi * (2.0 * fi - 1.0));
        acc += term;
        d[i] = acc;
    }
    let mut sum = CompensatedSum::new();
    for (k, dk) in d.iter().take(N).enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (dk - d[N]) / ((k + 1) as f64).powf(s);
    }
    -sum.value() / d[N]
}

/// `w_k(s) = −1/(1−s) + k^{1−s}/(1−s) − Σ_{q<k} q^{−s} = ∫_1^k (t^{−s} − ⌊t⌋^{−s}) dt`.
pub fn w_k(s: f64, k: u64) -> Result<f64> {
    if k < 2 {
        return Err(Error::Argument(format!("w_k needs k ≥ 2, got {k}")));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Argument(format!(
            "w_k is provided for 0 < s < 1, got {s}"
        )));
    }
    let mut sum = CompensatedSum::new();
    sum += -1.0 / (1.0 - s);
    sum += (k as f64).powf(1.0 - s) / (1.0 - s);
    for q in 1..k {
        sum += -(q as f64).powf(-s);
    }
    Ok(sum.value())
}

/// `−ζ(s)` estimated from `w_k`: `w_k + 1/(1−s)` with the two leading
/// Euler–Maclaurin corrections of the truncated sum.
pub fn zeta_from_w_k(s: f64, k: u64) -> Result<f64> {
    let kf = k as f64;
    let neg = w_k(s, k)? + 1.0 / (1.0 - s);
    Ok(-neg + 0.5 * kf.powf(-s) + s * kf.powf(-1.0 - s) / 12.0)
}

/// Constants of the second spectral term for dimension `D` and `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaContext {
    #[serde(rename = "D")]
    pub dimension: f64,
    #[serde(rename = "L")]
    pub scale: f64,
    pub zeta_d: f64,
    /// `2^{D−1}π^{−D}(1−D)(−ζ(D))`.
    pub c1d: f64,
    /// `M = S = 2^{1−D}L^D/(1−D)`.
    pub content: f64,
    /// `π^{−D}(−ζ(D))L^D`, the limit of `(φ−N)/f(√λ)`.
    pub target_remainder: f64,
    /// `(−ζ(D))L^D`, the limit of `δ(x)/f(x)`.
    pub target_delta: f64,
    /// `|c1D·M − target_remainder| / target_remainder`.
    pub identity_defect: f64,
}

impl ZetaContext {
    pub fn new(dimension: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Argument(format!("L must be positive, got {scale}")));
        }
        let d = dimension;
        let zeta_d = zeta(d)?;
        let c1d = 2f64.powf(d - 1.0) * PI.powf(-d) * (1.0 - d) * -zeta_d;
        let content = 2f64.powf(1.0 - d) * scale.powf(d) / (1.0 - d);
        let target_delta = -zeta_d * scale.powf(d);
        let target_remainder = PI.powf(-d) * target_delta;
        Ok(ZetaContext {
            dimension: d,
            scale,
            zeta_d,
            c1d,
            content,
            target_remainder,
            target_delta,
            identity_defect: (c1d * content - target_remainder).abs() / target_remainder,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralRecord {
    pub lambda: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub phi: f64,
    /// `δ(√λ/π)`.
    pub delta: f64,
    /// `f(√λ)`.
    pub f: f64,
    /// `(φ − N)/f(√λ)`.
    pub remainder_ratio: f64,
    /// `δ(x)/f(x)` at `x = √λ/π`.
    pub delta_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondTermProbe {
    pub records: Vec<SpectralRecord>,
    pub zeta: ZetaContext,
    /// λ values where `f` was undefined.
    pub skipped: Vec<f64>,
}

/// Geometric λ grid `λ_0·4^k`, doubling `√λ` per step.
pub fn lambda_grid(lambda0: f64, n: usize) -> Result<Vec<f64>> {
    check_lambda(lambda0)?;
    Ok((0..n).map(|k| lambda0 * 4f64.powi(k as i32)).collect())
}

/// One record per λ; `f` comes from the gauge of index `1 − D`.
pub fn spectral_record(
    string: &FractalString,
    derived: &DerivedFunctions,
    lambda: f64,
    precision: Precision,
) -> Result<SpectralRecord> {
    check_lambda(lambda)?;
    let x = frequency(lambda);
    let f_sqrt = derived.f(lambda.sqrt())?;
    let f_x = derived.f(x)?;
    let head = scan_head(string, x, precision)?;
    let delta = head.fract + x * string.tail_after(head.terms)?;
    let phi = weyl_term(string, lambda);
    Ok(SpectralRecord {
        lambda,
        n: head.floors,
        phi,
        delta,
        f: f_sqrt,
        remainder_ratio: (phi - head.floors as f64) / f_sqrt,
        delta_ratio: delta / f_x,
    })
}

pub fn second_term_probe(
    string: &FractalString,
    gauge: &GaugeFunction,
    scale: f64,
    lambdas: &[f64],
    precision: Precision,
) -> Result<SecondTermProbe> {
    if lambdas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Argument("λ grid must be strictly increasing".into()));
    }
    let dimension = 1.0 - gauge.index();
    let derived = make_derived(gauge, dimension)?;
    let zeta = ZetaContext::new(dimension, scale)?;
    let mut records = Vec::with_capacity(lambdas.len());
    let mut skipped = Vec::new();
    for &lambda in lambdas {
        match spectral_record(string, &derived, lambda, precision) {
            Ok(r) => records.push(r),
            Err(Error::Domain(_)) => skipped.push(lambda),
            Err(e) => return Err(e),
        }
    }
    Ok(SecondTermProbe {
        records,
        zeta,
        skipped,
    })
}

pub const CSV_HEADER: &str = "lambda,N,phi,delta,f,remainder_ratio";

pub fn records_to_csv(records: &[SpectralRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_sig(r.lambda),
            r.n,
            fmt_sig(r.phi),
            fmt_sig(r.delta),
            fmt_sig(r.f),
            fmt_sig(r.remainder_ratio)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZETA_HALF: f64 = -1.4603545088095868;

    fn interval() -> FractalString {
        FractalString::single_interval(1.0).unwrap()
    }

    #[test]
    fn counts_on_intervals() {
        let s = interval();
        assert_eq!(eigen_count(&s, 4.0 * PI * PI).unwrap(), 2);
        for k in 1..=5u64 {
            let lambda = (PI * k as f64).powi(2);
            assert_eq!(eigen_count(&s, lambda).unwrap(), k, "k = {k}");
        }
        let two = FractalString::explicit(vec![1.0, 0.5]).unwrap();
        assert_eq!(eigen_count(&two, 9.0 * PI * PI).unwrap(), 4);
        assert!(eigen_count(&s, 0.0).is_err());
    }

    #[test]
    fn weyl_values() {
        assert!((weyl_term(&interval(), PI * PI) - 1.0).abs() < 1e-15);
        assert!((weyl_term(&interval(), 4.0 * PI * PI) - 2.0).abs() < 1e-15);
        assert!((weyl_term(&FractalString::cantor(), 100.0) - 10.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn defect_on_interval() {
        assert_eq!(packing_defect(&interval(), 1.5).unwrap(), 0.5);
        assert_eq!(packing_defect(&interval(), 3.0).unwrap(), 0.0);
        assert_eq!(packing_defect(&interval(), 0.25).unwrap(), 0.25);
        let r = remainder_identity_check(&interval(), &[PI * PI]).unwrap();
        assert!(r.max_abs < 1e-15);
    }

    // Oracle: for integer x, {x/j²} = (x mod j²)/j² exactly; the tail Σ_{j>m} j^{-2}
    // is the asymptotic series of the trigamma function.
    fn inverse_square_oracle(x: u64) -> f64 {
        let mut head = 0.0f64;
        let mut j = 1u64;
        while j * j <= x {
            head += (x % (j * j)) as f64 / (j * j) as f64;
            j += 1;
        }
        let m = (j - 1) as f64;
        let tail = 1.0 / m - 0.5 / (m * m) + 1.0 / (6.0 * m.powi(3)) - 1.0 / (30.0 * m.powi(5));
        head + x as f64 * tail
    }

    fn inverse_square() -> FractalString {
        let g = GaugeFunction::power(0.5, 1.0).unwrap();
        let d = make_derived(&g, 0.5).unwrap();
        FractalString::profile(1.0, &d, None).unwrap()
    }

    #[test]
    fn inverse_square_defect_matches_integer_oracle() {
        let s = inverse_square();
        assert!((s.length(3).unwrap() - 1.0 / 9.0).abs() < 1e-16);
        for x in [10_000u64, 1_000_000, 100_000_000, 10_000_000_000] {
            let ours = packing_defect(&s, x as f64).unwrap();
            let oracle = inverse_square_oracle(x);
            assert!(
                (ours - oracle).abs() < 1e-8 * oracle,
                "x = {x}: {ours} vs {oracle}"
            );
        }
        // 1.4234 at x = 1e4: still 2.5% short, closing in as x grows
        let gaps: Vec<f64> = [1e4, 1e6, 1e8, 1e10]
            .iter()
            .map(|&x| (packing_defect(&s, x).unwrap() / x.sqrt() + ZETA_HALF).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(
            gaps[0] < 0.03 * -ZETA_HALF && gaps[3] < 0.02 * -ZETA_HALF,
            "{gaps:?}"
        );
    }

    #[test]
    fn double_precision_loses_the_remainder() {
        // at x ~ 1e10 the naive product leaves ~1e-6 absolute error per term
        let s = inverse_square();
        let x = 1e10 + 0.5;
        let ext = packing_defect_with(&s, x, Precision::Extended).unwrap();
        let dbl = packing_defect_with(&s, x, Precision::Double).unwrap();
        assert!((ext - dbl).abs() < 1.0, "{ext} {dbl}");
        let r = remainder_identity_check_with(
            &s.truncate(100_000).unwrap(),
            &[(PI * 1e10).powi(2)],
            Precision::Extended,
        )
        .unwrap();
        assert!(r.max_scaled < 1e-9);
    }

    #[test]
    fn identity_on_cantor_and_a_string() {
        let lambdas = lambda_grid(1.0, 16).unwrap();
        let cantor = FractalString::cantor().truncate_depth(20).unwrap();
        let r = remainder_identity_check(&cantor, &[1e6]).unwrap();
        assert!(r.max_scaled < 1e-9, "{r:?}");
        let r = remainder_identity_check(&cantor, &lambdas).unwrap();
        assert!(r.max_scaled < 1e-9, "{r:?}");
        let a = FractalString::a_string(1.0)
            .unwrap()
            .truncate(10_000)
            .unwrap();
        let r = remainder_identity_check(&a, &lambdas).unwrap();
        assert!(r.max_scaled < 1e-9, "{r:?}");
        // exact tie: λ = (3π)² makes 1/3·x = 1
        let r = remainder_identity_check(&FractalString::cantor(), &[9.0 * PI * PI]).unwrap();
        assert!(r.max_abs < 1e-12, "{r:?}");
    }

    #[test]
    fn defect_bounds() {
        let s = FractalString::a_string(0.5).unwrap();
        for x in [3.0, 17.5, 1e3, 2.2e5] {
            let delta = packing_defect(&s, x).unwrap();
            let lower = x * s.tail_sum_beyond(1.0 / x).unwrap();
            let upper = lower + s.count_exceeding(1.0 / x).unwrap() as f64;
            assert!(lower <= delta + 1e-9 && delta <= upper + 1e-9, "{x}");
        }
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(0.5).unwrap() - ZETA_HALF).abs() < 1e-13);
        // oracle: Hurwitz-type analytic continuation ζ(s) = Σ_{n<N} n^{-s} + N^{1-s}/(s-1) + ...
        for s in [0.3, 0.5, 0.7] {
            let z = zeta(s).unwrap();
            assert!(z < 0.0);
            let n = 1000.0f64;
            let mut em: f64 = (1..1000).map(|k| (k as f64).powf(-s)).sum();
            em += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
                - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0;
            assert!((z - em).abs() < 1e-12, "{s}: {z} vs {em}");
            assert!(((1.0 - 2f64.powf(1.0 - s)) * z - eta(s)).abs() < 1e-12);
        }
        assert!(zeta(1.0).is_err() && zeta(0.0).is_err());
    }

    #[test]
    fn w_k_values() {
        assert!((w_k(0.5, 3).unwrap() - (-0.2430052)).abs() < 1e-7);
        assert!((w_k(0.5, 2).unwrap() - (-0.1715729)).abs() < 1e-7);
        assert!(w_k(0.5, 1).is_err());
        // quadrature oracle ∫_1^k (t^{-s} − ⌊t⌋^{-s}) dt
        let s = 0.3;
        let mut q = 0.0;
        for m in 1..7 {
            let mf = m as f64;
            q += ((mf + 1.0).powf(1.0 - s) - mf.powf(1.0 - s)) / (1.0 - s) - mf.powf(-s);
        }
        assert!((w_k(s, 7).unwrap() - q).abs() < 1e-13);
        for d in [0.3, 0.5, 0.7] {
            let k = 1_000_000u64;
            let gap = (w_k(d, k).unwrap() + 1.0 / (1.0 - d) + zeta(d).unwrap()).abs();
            assert!(gap <= 2.0 * (k as f64).powf(-d), "{d}: {gap}");
        }
        assert!((zeta_from_w_k(0.5, 10_000).unwrap() - ZETA_HALF).abs() < 1e-6);
    }

    #[test]
    fn constant_identity() {
        for d in [0.3, 0.5, 0.7] {
            for l in [0.5, 1.0, 2.0] {
                let z = ZetaContext::new(d, l).unwrap();
                assert!(z.identity_defect < 1e-12);
            }
        }
        let z = ZetaContext::new(0.5, 1.0).unwrap();
        assert!((z.c1d - 0.2912986).abs() < 1e-6, "{}", z.c1d);
    }

    #[test]
    fn probe_and_csv() {
        let s = interval();
        let g = GaugeFunction::power(0.5, 1.0).unwrap();
        let probe =
            second_term_probe(&s, &g, 1.0, &[PI * PI, 4.0 * PI * PI], Precision::Extended).unwrap();
        let csv = records_to_csv(&probe.records);
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[0], CSV_HEADER);
        assert!(
            rows[1].starts_with("9.86960440108936,1,1,0,"),
            "{}",
            rows[1]
        );
        assert!(
            rows[2].starts_with("39.4784176043574,2,2,0,"),
            "{}",
            rows[2]
        );
        assert!(second_term_probe(&s, &g, 1.0, &[4.0, 1.0], Precision::Extended).is_err());
    }

    #[test]
    fn cantor_remainder_oscillates_in_a_band() {
        let c = FractalString::cantor();
        let d = 2f64.ln() / 3f64.ln();
        let g = GaugeFunction::power(1.0 - d, 1.0).unwrap();
        // 5 periods of 3 in x, i.e. 9 in λ, 16 points per period
        let lambdas: Vec<f64> = (0..=80).map(|k| 1e8 * 9f64.powf(k as f64 / 16.0)).collect();
        let probe = second_term_probe(&c, &g, 1.0, &lambdas, Precision::Extended).unwrap();
        let ratios: Vec<f64> = probe.records.iter().map(|r| r.remainder_ratio).collect();
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        assert!(lo > 0.05 && hi < 5.0 && hi / lo > 1.05, "{lo} {hi}");
    }
}
