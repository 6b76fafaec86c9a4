//! Inner tube volumes, boundary counts and generalized Minkowski/S-content
//! estimates for the boundary `F` of the open set realizing a fractal string.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{GaugeFunction, GaugeSpec};
pub use crate::grid::{GridSpec, ScaleGrid};
use crate::karamata::{summarize_ratio, TREND_TOLERANCE};
use crate::numeric::ls_slope;
use crate::strings::FractalString;

/// `|F_ε ∩ Ω| = Σ_j min(l_j, 2ε) = Σ_{j > J(2ε)} l_j + 2ε·J(2ε)`.
pub fn tube_volume(string: &FractalString, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Argument(format!(
            "tube volume needs ε > 0, got {eps}"
        )));
    }
    let count = string.count_exceeding(2.0 * eps)?;
    Ok(string.tail_after(count)? + 2.0 * eps * count as f64)
}

/// `H⁰(∂F_ε ∩ Ω) = 2·J(2ε)`: every interval longer than `2ε` contributes two points.
pub fn boundary_count(string: &FractalString, eps: f64) -> Result<u64> {
    if !(eps > 0.0) {
        return Err(Error::Argument(format!(
            "boundary count needs ε > 0, got {eps}"
        )));
    }
    string
        .count_exceeding(2.0 * eps)?
        .checked_mul(2)
        .ok_or_else(|| Error::Range(format!("boundary count at ε = {eps} overflows")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContentKind {
    Minkowski,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Lower and upper estimates agree within the band.
    Measurable,
    /// Both estimates are positive and finite but differ.
    Nondegenerate,
    /// The ratio drifts to 0 or ∞ (or is not positive and finite).
    Degenerate,
}

impl Verdict {
    pub fn is_nondegenerate(self) -> bool {
        !matches!(self, Verdict::Degenerate)
    }
}

/// Trailing-grid estimate of a lower/upper content pair.
///
/// The measurable/nondegenerate split uses the heuristic threshold
/// `upper/lower ≤ 1 + band`; finite grids cannot certify either verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentEstimate {
    pub kind: ContentKind,
    pub lower: f64,
    pub upper: f64,
    pub verdict: Verdict,
    pub gauge_index: f64,
    pub gauge: GaugeSpec,
    pub grid: GridSpec,
    pub band: f64,
    /// Log-log slope of the sampled ratio over the trailing two-thirds.
    pub trend: f64,
    /// Scales where the normalizing function vanished.
    pub skipped: usize,
    pub scales: Vec<f64>,
    pub values: Vec<f64>,
}

impl ContentEstimate {
    /// Midpoint of the trailing range; meaningful for measurable verdicts.
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

pub(crate) fn verdict_for(lower: f64, upper: f64, trend: f64, band: f64) -> Verdict {
    if !(lower > 0.0) || !upper.is_finite() || !(trend.abs() <= TREND_TOLERANCE) {
        Verdict::Degenerate
    } else if upper / lower <= 1.0 + band {
        Verdict::Measurable
    } else {
        Verdict::Nondegenerate
    }
}

fn check_gauge_covers(gauge: &GaugeFunction, grid: &ScaleGrid) -> Result<()> {
    if grid.scales()[0] > gauge.domain_upper() {
        return Err(Error::Argument(format!(
            "grid starts at {} beyond the gauge domain (0, {}]",
            grid.scales()[0],
            gauge.domain_upper()
        )));
    }
    Ok(())
}

fn estimate(
    kind: ContentKind,
    gauge: &GaugeFunction,
    grid: &ScaleGrid,
    band: f64,
    samples: Vec<(f64, f64)>,
) -> Result<ContentEstimate> {
    let skipped = grid.len() - samples.len();
    if samples.len() < crate::grid::MIN_GRID_POINTS {
        return Err(Error::Argument(format!(
            "only {} usable scales remain after skipping {skipped}",
            samples.len()
        )));
    }
    let (scales, values): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    let (lower, upper, trend) = summarize_ratio(&scales, &values);
    Ok(ContentEstimate {
        kind,
        lower,
        upper,
        verdict: verdict_for(lower, upper, trend, band),
        gauge_index: gauge.index(),
        gauge: gauge.spec(),
        grid: grid.spec(),
        band,
        trend,
        skipped,
        scales,
        values,
    })
}

/// Samples `V(ε)/h(ε)` over the grid.
pub fn minkowski_estimate(
    string: &FractalString,
    gauge: &GaugeFunction,
    grid: &ScaleGrid,
    band: f64,
) -> Result<ContentEstimate> {
    check_gauge_covers(gauge, grid)?;
    let mut samples = Vec::with_capacity(grid.len());
    for &eps in grid.scales() {
        samples.push((eps, tube_volume(string, eps)? / gauge.eval_h(eps)?));
    }
    estimate(ContentKind::Minkowski, gauge, grid, band, samples)
}

/// Samples `H⁰(∂F_ε ∩ Ω)/h'(ε)` over the grid, skipping scales where `h' = 0`.
pub fn s_estimate(
    string: &FractalString,
    gauge: &GaugeFunction,
    grid: &ScaleGrid,
    band: f64,
) -> Result<ContentEstimate> {
    check_gauge_covers(gauge, grid)?;
    let mut samples = Vec::with_capacity(grid.len());
    for &eps in grid.scales() {
        let dh = gauge.eval_dh(eps)?;
        if dh == 0.0 {
            continue;
        }
        samples.push((eps, boundary_count(string, eps)? as f64 / dh));
    }
    if samples.is_empty() {
        return Err(Error::Evaluation("h' vanishes at every grid scale".into()));
    }
    estimate(ContentKind::S, gauge, grid, band, samples)
}

/// `1 - s` where `s` is the least-squares slope of `ln V(ε)` against `ln ε`
/// on the trailing two-thirds of the grid.
pub fn dimension_estimate(string: &FractalString, grid: &ScaleGrid) -> Result<f64> {
    let scales = grid.scales();
    if scales[0] / scales[scales.len() - 1] < 1e3 {
        return Err(Error::Argument(
            "dimension estimates need a grid spanning ≥ 3 decades".into(),
        ));
    }
    let from = scales.len() / 3;
    let mut xs = Vec::with_capacity(scales.len() - from);
    let mut ys = Vec::with_capacity(scales.len() - from);
    for &eps in &scales[from..] {
        xs.push(eps.ln());
        ys.push(tube_volume(string, eps)?.ln());
    }
    let slope = ls_slope(&xs, &ys)
        .ok_or_else(|| Error::numeric("degenerate regression for the dimension", f64::NAN))?;
    Ok(1.0 - slope)
}
