//! Numerical Karamata theory: uniform-convergence defects, the representation
//! `ℓ(y) = c(y)·exp(∫_y^a ε(u)/u du)`, integral and sum asymptotics, and
//! finite-grid classification of asymptotic ratios.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::ScaleDefect;
use crate::grid::{trailing_third_start, ScaleGrid, MIN_GRID_POINTS};
use crate::numeric::{euler_maclaurin_tail, integrate, integrate_tail, ls_slope};

pub const DEFAULT_BAND: f64 = 0.02;

/// Largest `|d ln(ratio) / d ln(scale)|` on the trailing two-thirds of a grid
/// that still counts as "no power-law drift". Ratios drifting faster are
/// treated as tending to 0 or ∞.
pub const TREND_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RvDefect {
    pub per_scale: Vec<ScaleDefect>,
    /// `(t, y)` pairs skipped because `t·y` left the domain.
    pub skipped: usize,
}

impl RvDefect {
    /// True when the defect never increases as `y` decreases along the grid.
    pub fn is_decreasing(&self) -> bool {
        self.per_scale
            .windows(2)
            .all(|w| w[1].defect <= w[0].defect * (1.0 + 1e-9) + 1e-15)
    }

    pub fn last(&self) -> f64 {
        self.per_scale.last().map_or(f64::NAN, |s| s.defect)
    }
}

/// `sup_{t ∈ t_grid} |h(ty)/h(y) - t^rho|` for every `y` in `y_grid`.
pub fn rv_defect(
    h: &dyn Fn(f64) -> Result<f64>,
    domain_upper: f64,
    rho: f64,
    t_grid: &[f64],
    y_grid: &[f64],
) -> Result<RvDefect> {
    if t_grid.is_empty() || y_grid.is_empty() {
        return Err(Error::Argument("rv_defect needs non-empty grids".into()));
    }
    let mut per_scale = Vec::with_capacity(y_grid.len());
    let mut skipped = 0;
    for &y in y_grid {
        let hy = h(y)?;
        let mut worst: f64 = 0.0;
        let mut used = 0;
        for &t in t_grid {
            if t * y > domain_upper {
                skipped += 1;
                continue;
            }
            used += 1;
            worst = worst.max((h(t * y)? / hy - t.powf(rho)).abs());
        }
        if used == 0 {
            continue;
        }
        per_scale.push(ScaleDefect { y, defect: worst });
    }
    if per_scale.is_empty() {
        return Err(Error::Domain("every t·y left the domain".into()));
    }
    Ok(RvDefect { per_scale, skipped })
}

/// Canonical representation with constant `c` and `ε` equal to the negated elasticity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationDecomposition {
    pub anchor: f64,
    pub scales: Vec<f64>,
    pub c_values: Vec<f64>,
    pub eps_values: Vec<f64>,
    pub limit_c: f64,
    /// Largest relative mismatch between `ℓ` and its reconstruction on the grid.
    pub reconstruction_residual: f64,
}

impl RepresentationDecomposition {
    /// `|ε|` does not increase toward zero on the trailing third.
    pub fn eps_trends_to_zero(&self) -> bool {
        let start = trailing_third_start(self.eps_values.len());
        self.eps_values[start..]
            .windows(2)
            .all(|w| w[1].abs() <= w[0].abs() + 1e-15)
    }
}

pub fn extract_representation(
    ell: &dyn Fn(f64) -> Result<f64>,
    d_ell: &dyn Fn(f64) -> Result<f64>,
    anchor: f64,
    y_grid: &[f64],
) -> Result<RepresentationDecomposition> {
    if !(anchor > 0.0) || y_grid.is_empty() {
        return Err(Error::Argument(
            "representation needs a > 0 and a non-empty grid".into(),
        ));
    }
    let eps = |u: f64| -> Result<f64> {
        let e = -u * d_ell(u)? / ell(u)?;
        if e.is_finite() {
            Ok(e)
        } else {
            Err(Error::Evaluation(format!("ℓ'/ℓ is not finite at {u}")))
        }
    };
    let c = ell(anchor)?;
    let mut eps_values = Vec::with_capacity(y_grid.len());
    let mut residual: f64 = 0.0;
    for &y in y_grid {
        eps_values.push(eps(y)?);
        // ∫_y^a ε(u)/u du = ∫_{ln y}^{ln a} ε(e^s) ds
        let failure = RefCell::new(None);
        let q = integrate(
            |s| match eps(s.exp()) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            },
            y.ln(),
            anchor.ln(),
            1e-13,
            1e-15,
        )?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let rebuilt = c * q.value.exp();
        let target = ell(y)?;
        residual = residual.max(((rebuilt - target) / target).abs());
    }
    Ok(RepresentationDecomposition {
        anchor,
        scales: y_grid.to_vec(),
        c_values: vec![c; y_grid.len()],
        eps_values,
        limit_c: c,
        reconstruction_residual: residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KaramataHalf {
    /// `x^{σ+1} f(x) / ∫_X^x u^σ f(u) du → σ + ϱ + 1`
    Direct,
    /// `x^{σ+1} f(x) / ∫_x^∞ u^σ f(u) du → -(σ + ϱ + 1)`
    Tail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KaramataRatio {
    pub half: KaramataHalf,
    pub ratio: f64,
    pub predicted: f64,
}

/// Karamata's theorem for `f` regularly varying at infinity with index `rho`.
///
/// Uses the direct half when `σ ≥ -(ϱ+1)` (this needs a finite lower limit
/// `lower`) and the tail half otherwise.
pub fn karamata_direct(
    f: &dyn Fn(f64) -> f64,
    rho: f64,
    sigma: f64,
    x: f64,
    lower: Option<f64>,
) -> Result<KaramataRatio> {
    if !(x > 0.0) || !rho.is_finite() || !sigma.is_finite() {
        return Err(Error::Argument(
            "karamata_direct needs x > 0 and finite indices".into(),
        ));
    }
    let exponent = sigma + rho + 1.0;
    let head = x.powf(sigma + 1.0) * f(x);
    if exponent >= 0.0 {
        let Some(lower) = lower.filter(|l| *l > 0.0 && *l < x) else {
            return Err(Error::Argument(format!(
                "σ + ϱ + 1 = {exponent} ≥ 0: the tail integral diverges, give a lower limit in (0, x)"
            )));
        };
        let q = integrate(
            |s| ((sigma + 1.0) * s).exp() * f(s.exp()),
            lower.ln(),
            x.ln(),
            1e-13,
            0.0,
        )?;
        Ok(KaramataRatio {
            half: KaramataHalf::Direct,
            ratio: head / q.value,
            predicted: exponent,
        })
    } else {
        let q = integrate_tail(|u| u.powf(sigma) * f(u), x, sigma + rho, 1e-13)?;
        if !q.converged {
            return Err(Error::numeric("tail integral did not converge", q.value));
        }
        Ok(KaramataRatio {
            half: KaramataHalf::Tail,
            ratio: head / q.value,
            predicted: -exponent,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSum {
    pub sum: f64,
    pub predicted: f64,
    pub ratio: f64,
}

/// `Σ_{j ≥ k} g(j)` against the prediction `-k·g(k)/(ϱ+1)`.
pub fn tail_sum_rv(g: &dyn Fn(f64) -> f64, rho: f64, k: u64) -> Result<TailSum> {
    if !rho.is_finite() || rho >= -1.0 {
        return Err(Error::Argument(format!(
            "tail sums need a finite index below -1, got {rho}"
        )));
    }
    if k == 0 {
        return Err(Error::Argument("tail sums start at k ≥ 1".into()));
    }
    let kf = k as f64;
    let gk = g(kf);
    if !(gk > 0.0) || !gk.is_finite() {
        return Err(Error::Argument(format!("g({k}) = {gk} is not positive")));
    }
    // g(2k)/g(k) must be close to 2^ϱ for a regularly varying g; a factor of
    // two either way is generous for slowly varying corrections.
    let doubling = g(2.0 * kf) / gk / 2f64.powf(rho);
    if !(0.5..=2.0).contains(&doubling) {
        return Err(Error::Argument(format!(
            "g(2k)/g(k) deviates from 2^ϱ by a factor {doubling}; g is not regularly varying with index {rho}"
        )));
    }
    let sum = euler_maclaurin_tail(g, rho, k)?;
    let predicted = -kf * gk / (rho + 1.0);
    Ok(TailSum {
        sum,
        predicted,
        ratio: sum / predicted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioClass {
    /// `f1 ~ f2`
    Equivalent,
    /// `f1 ≍ f2`
    Similar,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioVerdict {
    pub liminf: f64,
    pub limsup: f64,
    pub classification: RatioClass,
    /// Log-log slope of the ratio over the trailing two-thirds.
    pub trend: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Trailing-third min/max and drift of a sampled ratio.
pub(crate) fn summarize_ratio(grid: &[f64], values: &[f64]) -> (f64, f64, f64) {
    let start = trailing_third_start(values.len());
    let tail = &values[start..];
    let liminf = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let limsup = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let from = values.len() / 3;
    let trend = if values[from..].iter().all(|v| *v > 0.0 && v.is_finite()) {
        let xs: Vec<f64> = grid[from..].iter().map(|s| s.ln()).collect();
        let ys: Vec<f64> = values[from..].iter().map(|v| v.ln()).collect();
        ls_slope(&xs, &ys).unwrap_or(0.0)
    } else {
        f64::NAN
    };
    (liminf, limsup, trend)
}

pub fn classify_values(grid: &[f64], values: Vec<f64>, band: f64) -> RatioVerdict {
    let (liminf, limsup, trend) = summarize_ratio(grid, &values);
    let bounded = liminf > 0.0 && limsup.is_finite() && trend.abs() <= TREND_TOLERANCE;
    let classification = if bounded && liminf >= 1.0 - band && limsup <= 1.0 + band {
        RatioClass::Equivalent
    } else if bounded {
        RatioClass::Similar
    } else {
        RatioClass::Neither
    };
    RatioVerdict {
        liminf,
        limsup,
        classification,
        trend,
        grid: grid.to_vec(),
        values,
    }
}

/// Samples `f1/f2` on the grid and classifies the relation as `y → 0`.
pub fn classify_ratio(
    f1: &dyn Fn(f64) -> Result<f64>,
    f2: &dyn Fn(f64) -> Result<f64>,
    grid: &ScaleGrid,
    band: f64,
) -> Result<RatioVerdict> {
    classify_on(f1, f2, grid.scales(), band)
}

/// As [`classify_ratio`] on an arbitrary sample sequence tending to the limit point.
pub fn classify_on(
    f1: &dyn Fn(f64) -> Result<f64>,
    f2: &dyn Fn(f64) -> Result<f64>,
    points: &[f64],
    band: f64,
) -> Result<RatioVerdict> {
    if points.len() < MIN_GRID_POINTS {
        return Err(Error::Argument(format!(
            "ratio classification needs at least {MIN_GRID_POINTS} points, got {}",
            points.len()
        )));
    }
    let mut values = Vec::with_capacity(points.len());
    for &y in points {
        let d = f2(y)?;
        if !(d > 0.0) {
            return Err(Error::Argument(format!(
                "denominator {d} is not positive at {y}"
            )));
        }
        values.push(f1(y)? / d);
    }
    Ok(classify_values(points, values, band))
}
