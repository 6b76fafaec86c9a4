//! Experiment runner: wires gauges, strings, geometry and spectral checks into
//! the two-sided-bounds assertions and the Minkowski-measurability assertions.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gauge::{make_derived, DerivedFunctions, GaugeFunction, GaugeSpec};
use crate::geometry::{
    dimension_estimate, minkowski_estimate, s_estimate, verdict_for, ContentEstimate, Verdict,
};
use crate::grid::{GridSpec, ScaleGrid};
use crate::karamata::{summarize_ratio, DEFAULT_BAND};
use crate::numeric::round_sig;
use crate::spectral::{
    frequency, lambda_grid, packing_defect_with, spectral_record, w_k, SpectralRecord, ZetaContext,
};
use crate::strings::{FractalString, Precision, StringSpec};

fn default_band() -> f64 {
    DEFAULT_BAND
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaGridSpec {
    pub lambda0: f64,
    pub n: usize,
}

impl Default for LambdaGridSpec {
    fn default() -> Self {
        LambdaGridSpec {
            lambda0: 100.0,
            n: 16,
        }
    }
}

/// Geometric index grid `j0·ratio^k`, rounded to integers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexGridSpec {
    pub j0: u64,
    pub ratio: f64,
    pub n: usize,
}

impl Default for IndexGridSpec {
    fn default() -> Self {
        IndexGridSpec {
            j0: 64,
            ratio: 2f64.powf(0.125),
            n: 81,
        }
    }
}

impl IndexGridSpec {
    pub fn indices(&self) -> Result<Vec<u64>> {
        if self.j0 < 1 || !(self.ratio > 1.0) || self.n < crate::grid::MIN_GRID_POINTS {
            return Err(Error::Argument(format!("invalid index grid {self:?}")));
        }
        Ok((0..self.n)
            .map(|k| (self.j0 as f64 * self.ratio.powi(k as i32)).round() as u64)
            .collect())
    }
}

/// Tolerance bands per check family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bands {
    #[serde(default = "default_band")]
    pub content: f64,
    #[serde(default = "default_band")]
    pub lengths: f64,
    #[serde(default = "default_band")]
    pub constant: f64,
}

impl Default for Bands {
    fn default() -> Self {
        Bands {
            content: DEFAULT_BAND,
            lengths: DEFAULT_BAND,
            constant: DEFAULT_BAND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub string: StringSpec,
    pub gauge: GaugeSpec,
    #[serde(rename = "D")]
    pub dimension: f64,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    pub scale_grid: GridSpec,
    #[serde(default)]
    pub lambda_grid: LambdaGridSpec,
    #[serde(default)]
    pub j_grid: IndexGridSpec,
    #[serde(default)]
    pub bands: Bands,
}

/// Everything a run needs, built once from a config.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub string: FractalString,
    pub gauge: GaugeFunction,
    pub derived: DerivedFunctions,
    pub grid: ScaleGrid,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Argument(format!("malformed config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn build(&self) -> Result<Experiment> {
        let d = self.dimension;
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::Argument(format!("D must lie in (0,1), got {d}")));
        }
        let gauge = GaugeFunction::from_spec(&self.gauge)?;
        let derived = make_derived(&gauge, d)?;
        let string = FractalString::from_spec(&self.string)?;
        let grid = ScaleGrid::from_spec(self.scale_grid)?;
        self.j_grid.indices()?;
        lambda_grid(self.lambda_grid.lambda0, self.lambda_grid.n)?;
        if let Some(l) = self.scale {
            if !(l > 0.0) {
                return Err(Error::Argument(format!("L must be positive, got {l}")));
            }
        }
        Ok(Experiment {
            config: self.clone(),
            string,
            gauge,
            derived,
            grid,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub liminf: f64,
    pub limsup: f64,
    /// Log-log drift over the trailing two-thirds of the grid.
    pub trend: f64,
    pub verdict: Verdict,
    /// Grid the ratio was sampled on (scales, indices, x or λ values).
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl Evidence {
    fn from_samples(grid: Vec<f64>, values: Vec<f64>, band: f64) -> Self {
        let (liminf, limsup, trend) = summarize_ratio(&grid, &values);
        Evidence {
            liminf,
            limsup,
            trend,
            verdict: verdict_for(liminf, limsup, trend, band),
            grid,
            values,
        }
    }

    fn from_content(c: &ContentEstimate) -> Self {
        Evidence {
            liminf: c.lower,
            limsup: c.upper,
            trend: c.trend,
            verdict: c.verdict,
            grid: c.scales.clone(),
            values: c.values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssertionResult {
    pub label: String,
    pub statement: String,
    pub checked: bool,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Evidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AssertionResult {
    fn two_sided(label: &str, statement: &str, evidence: Evidence) -> Self {
        AssertionResult {
            label: label.into(),
            statement: statement.into(),
            checked: true,
            holds: evidence.verdict.is_nondegenerate(),
            evidence: Some(evidence),
            note: None,
        }
    }

    fn measurable(label: &str, statement: &str, evidence: Evidence) -> Self {
        AssertionResult {
            label: label.into(),
            statement: statement.into(),
            checked: true,
            holds: evidence.verdict == Verdict::Measurable,
            evidence: Some(evidence),
            note: None,
        }
    }
}

/// `M̂`, `Ŝ` and `2^{1−D}L̂^D/(1−D)` side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantCheck {
    pub minkowski: f64,
    pub s: f64,
    #[serde(rename = "L_hat")]
    pub l_hat: f64,
    pub predicted: f64,
    /// Largest pairwise relative gap among the three.
    pub spread: f64,
    pub holds: bool,
}

/// Observed second-term ratios against `π^{−D}(−ζ(D))L^D` and `(−ζ(D))L^D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondTermCheck {
    pub zeta: ZetaContext,
    /// `c_{1,D}·M̂`, the coefficient predicted from the measured content.
    pub c1d_times_m: f64,
    pub last_remainder_ratio: f64,
    pub last_delta_ratio: f64,
    pub remainder_error: f64,
    pub delta_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub part_one_agree: bool,
    pub part_two_agree: bool,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: ExperimentConfig,
    pub precision: Precision,
    pub part_one: Vec<AssertionResult>,
    pub part_two: Vec<AssertionResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<ConstantCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_term: Option<SecondTermCheck>,
    pub consistency: Consistency,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn assertion(&self, label: &str) -> Option<&AssertionResult> {
        self.part_one
            .iter()
            .chain(&self.part_two)
            .find(|a| a.label == label)
    }

    pub fn part_one_holds(&self) -> bool {
        self.part_one.iter().all(|a| a.holds)
    }

    pub fn part_two_holds(&self) -> bool {
        self.part_two.iter().all(|a| a.holds)
    }
}

fn label_err(label: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Numeric { message, partial } => Error::Numeric {
            message: format!("({label}) {message}"),
            partial,
        },
        Error::Domain(m) => Error::Domain(format!("({label}) {m}")),
        Error::Argument(m) => Error::Argument(format!("({label}) {m}")),
        Error::Evaluation(m) => Error::Evaluation(format!("({label}) {m}")),
        Error::Construction(m) => Error::Construction(format!("({label}) {m}")),
        Error::Range(m) => Error::Range(format!("({label}) {m}")),
    }
}

fn length_ratios(exp: &Experiment) -> Result<(Vec<f64>, Vec<f64>)> {
    let indices = exp.config.j_grid.indices()?;
    let len = exp.string.len();
    let mut grid = Vec::with_capacity(indices.len());
    let mut values = Vec::with_capacity(indices.len());
    for j in indices {
        let jf = j as f64;
        if jf < exp.derived.valid_from() {
            continue;
        }
        let l = match len {
            Some(n) if j > n => 0.0,
            _ => exp.string.length(j)?,
        };
        grid.push(jf);
        values.push(l / exp.derived.g(jf)?);
    }
    if grid.len() < crate::grid::MIN_GRID_POINTS {
        return Err(Error::Argument(
            "index grid lies below the domain of g".into(),
        ));
    }
    Ok((grid, values))
}

/// Runs every labelled assertion plus the constant and second-term checks.
pub fn cmd_verify(config: &ExperimentConfig, precision: Precision) -> Result<VerificationReport> {
    let exp = config.build()?;
    let bands = config.bands;
    let mut notes = vec![
        "verdicts are finite-grid heuristics: liminf/limsup come from the trailing third of each grid, \
         measurability means limsup/liminf ≤ 1 + band"
            .to_string(),
    ];

    let m = minkowski_estimate(&exp.string, &exp.gauge, &exp.grid, bands.content)
        .map_err(label_err("i"))?;
    let s =
        s_estimate(&exp.string, &exp.gauge, &exp.grid, bands.content).map_err(label_err("ii"))?;

    let (jg, jv) = length_ratios(&exp).map_err(label_err("iii"))?;
    let lengths = Evidence::from_samples(jg, jv, bands.lengths);

    let lambdas = lambda_grid(config.lambda_grid.lambda0, config.lambda_grid.n)?;
    let mut records: Vec<SpectralRecord> = Vec::with_capacity(lambdas.len());
    for &lambda in &lambdas {
        match spectral_record(&exp.string, &exp.derived, lambda, precision) {
            Ok(r) => records.push(r),
            Err(Error::Domain(_)) => {}
            Err(e) => return Err(label_err("iv")(e)),
        }
    }
    if records.len() < crate::grid::MIN_GRID_POINTS {
        return Err(Error::Argument(format!(
            "(iv) only {} λ values lie in the domain of f",
            records.len()
        )));
    }
    let xs: Vec<f64> = records.iter().map(|r| frequency(r.lambda)).collect();
    let delta = Evidence::from_samples(
        xs,
        records.iter().map(|r| r.delta_ratio).collect(),
        bands.content,
    );
    let remainder = Evidence::from_samples(
        records.iter().map(|r| r.lambda).collect(),
        records.iter().map(|r| r.remainder_ratio).collect(),
        bands.content,
    );

    let mut iii = AssertionResult::two_sided("iii", "l_j ≍ g(j)", lengths.clone());
    if exp.string.is_finite() {
        iii.note = Some("finite string: l_j = 0 beyond the last index".into());
    }
    let part_one = vec![
        AssertionResult::two_sided(
            "i",
            "0 < lower M(h) ≤ upper M(h) < ∞",
            Evidence::from_content(&m),
        ),
        AssertionResult::two_sided(
            "ii",
            "0 < lower S(h') ≤ upper S(h') < ∞",
            Evidence::from_content(&s),
        ),
        iii,
        AssertionResult::two_sided("iv", "Σ{l_j x} ≍ f(x)", delta.clone()),
        AssertionResult::two_sided("v", "φ(λ) − N(λ) ≍ f(√λ)", remainder.clone()),
    ];
    let part_two = vec![
        AssertionResult::measurable(
            "vi",
            "F is h-Minkowski measurable",
            Evidence::from_content(&m),
        ),
        AssertionResult::measurable("vii", "F is h'-S measurable", Evidence::from_content(&s)),
        AssertionResult::measurable("viii", "l_j ∼ L g(j) for some L > 0", lengths.clone()),
    ];

    if !part_one[0].holds {
        notes.push(
            "inapplicable regime: V(ε)/h(ε) degenerates under this gauge, so the gauge does not match the string"
                .into(),
        );
    }

    let mut constant = None;
    let mut second_term = None;
    if part_two.iter().all(|a| a.holds) {
        let d = config.dimension;
        let l_hat = 0.5 * (lengths.liminf + lengths.limsup);
        let predicted = 2f64.powf(1.0 - d) * l_hat.powf(d) / (1.0 - d);
        let vals = [m.value(), s.value(), predicted];
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let spread = hi / lo - 1.0;
        constant = Some(ConstantCheck {
            minkowski: m.value(),
            s: s.value(),
            l_hat,
            predicted,
            spread,
            holds: spread <= bands.constant,
        });
        if let Some(l) = config.scale {
            if (l_hat / l - 1.0).abs() > bands.lengths {
                notes.push(format!(
                    "estimated L̂ = {l_hat} differs from configured L = {l}"
                ));
            }
        }
        let zeta = ZetaContext::new(d, config.scale.unwrap_or(l_hat))?;
        let last = records.last().expect("records checked non-empty");
        second_term = Some(SecondTermCheck {
            c1d_times_m: zeta.c1d * m.value(),
            last_remainder_ratio: last.remainder_ratio,
            last_delta_ratio: last.delta_ratio,
            remainder_error: last.remainder_ratio / zeta.target_remainder - 1.0,
            delta_error: last.delta_ratio / zeta.target_delta - 1.0,
            zeta,
        });
    }

    let mut flags = Vec::new();
    let first = part_one[0].holds;
    for a in &part_one[1..] {
        if a.holds != first {
            flags.push(format!(
                "({}) {} but (i) {}: the equivalent assertions disagree on this grid",
                a.label,
                if a.holds { "holds" } else { "fails" },
                if first { "holds" } else { "fails" }
            ));
        }
    }
    let first = part_two[0].holds;
    for a in &part_two[1..] {
        if a.holds != first {
            flags.push(format!(
                "({}) {} but (vi) {}: the equivalent assertions disagree on this grid",
                a.label,
                if a.holds { "holds" } else { "fails" },
                if first { "holds" } else { "fails" }
            ));
        }
    }
    if part_two.iter().any(|a| a.holds) && !part_one.iter().all(|a| a.holds) {
        flags.push("a measurability assertion holds while a two-sided bound fails".into());
    }
    if let Some(c) = &constant {
        if !c.holds {
            flags.push(format!(
                "M̂, Ŝ and 2^(1-D)L̂^D/(1-D) spread by {:.3}",
                c.spread
            ));
        }
    }
    let consistency = Consistency {
        part_one_agree: part_one.iter().all(|a| a.holds == part_one[0].holds),
        part_two_agree: part_two.iter().all(|a| a.holds == part_two[0].holds),
        flags,
    };

    Ok(VerificationReport {
        config: config.clone(),
        precision,
        part_one,
        part_two,
        constant,
        second_term,
        consistency,
        notes,
    })
}

/// Spectral records on `steps` geometric points from `lmin` to `lmax`.
pub fn cmd_spectrum(
    config: &ExperimentConfig,
    lmin: f64,
    lmax: f64,
    steps: usize,
    precision: Precision,
) -> Result<Vec<SpectralRecord>> {
    if !(lmin > 0.0 && lmax >= lmin && lmax.is_finite())
        || steps == 0
        || (steps == 1 && lmax != lmin)
    {
        return Err(Error::Argument(format!(
            "need 0 < lmin ≤ lmax and steps ≥ 1 (steps ≥ 2 when lmin < lmax), got {lmin}, {lmax}, {steps}"
        )));
    }
    let exp = config.build()?;
    let ratio = if steps > 1 {
        (lmax / lmin).powf(1.0 / (steps - 1) as f64)
    } else {
        1.0
    };
    let mut out = Vec::with_capacity(steps);
    for k in 0..steps {
        let lambda = if k + 1 == steps {
            lmax
        } else {
            lmin * ratio.powi(k as i32)
        };
        match spectral_record(&exp.string, &exp.derived, lambda, precision) {
            Ok(r) => out.push(r),
            // f(√λ) undefined below the domain of the gauge: skip the row
            Err(Error::Domain(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        return Err(Error::Argument(format!(
            "no λ in [{lmin}, {lmax}] reaches the domain x ≥ {} of f",
            exp.derived.valid_from()
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentReport {
    pub minkowski: ContentEstimate,
    pub s: ContentEstimate,
    /// `1 −` trailing log-log slope of `V(ε)`; absent on grids shorter than 3 decades.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<f64>,
    pub notes: Vec<String>,
}

pub fn cmd_content(config: &ExperimentConfig) -> Result<ContentReport> {
    let exp = config.build()?;
    let band = config.bands.content;
    let minkowski = minkowski_estimate(&exp.string, &exp.gauge, &exp.grid, band)?;
    let s = s_estimate(&exp.string, &exp.gauge, &exp.grid, band)?;
    let mut notes = vec!["verdict threshold upper/lower ≤ 1 + band is a heuristic".to_string()];
    let dimension = match dimension_estimate(&exp.string, &exp.grid) {
        Ok(d) => Some(d),
        Err(Error::Argument(m)) => {
            notes.push(m);
            None
        }
        Err(e) => return Err(e),
    };
    Ok(ContentReport {
        minkowski,
        s,
        dimension,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WkRow {
    pub k: u64,
    pub w_k: f64,
    /// `w_k(D) + 1/(1−D) + ζ(D)`, which tends to 0.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaReport {
    #[serde(rename = "D")]
    pub dimension: f64,
    pub zeta_d: f64,
    pub c1d: f64,
    pub w_k: Vec<WkRow>,
}

pub fn cmd_zeta(dimension: f64) -> Result<ZetaReport> {
    let ctx = ZetaContext::new(dimension, 1.0)?;
    let mut rows = Vec::new();
    for e in 1..=6 {
        let k = 10u64.pow(e);
        let w = w_k(dimension, k)?;
        rows.push(WkRow {
            k,
            w_k: w,
            gap: w + 1.0 / (1.0 - dimension) + ctx.zeta_d,
        });
    }
    Ok(ZetaReport {
        dimension,
        zeta_d: ctx.zeta_d,
        c1d: ctx.c1d,
        w_k: rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringListing {
    pub lengths: Vec<f64>,
    pub total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
}

pub fn cmd_string(spec: &StringSpec, n: u64) -> Result<StringListing> {
    let string = FractalString::from_spec(spec)?;
    let take = string.len().map_or(n, |len| len.min(n));
    let lengths = (1..=take)
        .map(|j| string.length(j))
        .collect::<Result<_>>()?;
    Ok(StringListing {
        lengths,
        total: string.total_length(),
        count: string.len(),
    })
}

/// Serializes with every float rounded to 15 significant digits.
pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report serializes");
    round_floats(&mut v);
    serde_json::to_string_pretty(&v).expect("value serializes")
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .map(round_sig)
                .and_then(serde_json::Number::from_f64)
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// `δ(x)/f(x)` over `x0·ratio^k`, for quick curves (the demo uses it).
pub fn delta_ratio_curve(
    string: &FractalString,
    derived: &DerivedFunctions,
    x0: f64,
    ratio: f64,
    n: usize,
    precision: Precision,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let x = x0 * ratio.powi(k as i32);
        if x < derived.valid_from() {
            continue;
        }
        out.push((
            x,
            packing_defect_with(string, x, precision)? / derived.f(x)?,
        ));
    }
    Ok(out)
}

/// The bundled example suite: a-strings, Cantor, and profile strings for pure and
/// log-corrected gauges.
pub fn bundled_examples() -> Vec<(String, ExperimentConfig)> {
    let mut out = Vec::new();
    let power_grid = GridSpec {
        eps0: 2f64.powi(-10),
        q: 0.5,
        n: 31,
    };
    for a in [0.5, 1.0, 2.0] {
        let d = 1.0 / (a + 1.0);
        out.push((
            format!("a_string_{a}"),
            ExperimentConfig {
                string: StringSpec::AString { a },
                gauge: GaugeSpec::Powerlog {
                    rho: 1.0 - d,
                    log_exponents: vec![],
                    domain_upper: 1.0,
                },
                dimension: d,
                scale: Some(a),
                scale_grid: power_grid,
                lambda_grid: LambdaGridSpec::default(),
                j_grid: IndexGridSpec::default(),
                bands: Bands::default(),
            },
        ));
    }
    out.push(("cantor".into(), cantor_config()));
    for d in [0.3, 0.5, 0.7] {
        out.push((format!("profile_power_{d}"), profile_config(d, false)));
    }
    for d in [0.3, 0.5, 0.7] {
        out.push((format!("profile_log_{d}"), profile_config(d, true)));
    }
    out
}

/// Cantor string under `y^{1−log2/log3}`, on a grid of 5 periods of 3.
pub fn cantor_config() -> ExperimentConfig {
    let d = 2f64.ln() / 3f64.ln();
    ExperimentConfig {
        string: StringSpec::Cantor { depth: None },
        gauge: GaugeSpec::Powerlog {
            rho: 1.0 - d,
            log_exponents: vec![],
            domain_upper: 1.0,
        },
        dimension: d,
        scale: None,
        scale_grid: GridSpec {
            eps0: 3f64.powi(-8),
            q: 3f64.powf(-1.0 / 16.0),
            n: 81,
        },
        lambda_grid: LambdaGridSpec::default(),
        j_grid: IndexGridSpec::default(),
        bands: Bands::default(),
    }
}

// Log corrections close the content gap only like 1/ln(1/ε), so these grids run
// from 2^-40 down to where J(2ε) nears 1e15 terms.
fn log_profile_grid(d: f64) -> GridSpec {
    let last = 1e15f64.powf(-1.0 / d).max(1e-290);
    let n = (2f64.powi(-40) / last).log2() as usize;
    GridSpec {
        eps0: 2f64.powi(-40),
        q: 0.5,
        n,
    }
}

/// Profile string `l_j = g(j)` for `h = y^{1−D}` or `h = y^{1−D}·ln(1/y)`.
pub fn profile_config(d: f64, log: bool) -> ExperimentConfig {
    let gauge = GaugeSpec::Powerlog {
        rho: 1.0 - d,
        log_exponents: if log { vec![1.0] } else { vec![] },
        domain_upper: if log { (-2f64).exp() } else { 1.0 },
    };
    let band = if log { 0.05 } else { DEFAULT_BAND };
    ExperimentConfig {
        string: StringSpec::Profile {
            scale: 1.0,
            gauge: gauge.clone(),
            j_max: None,
        },
        gauge,
        dimension: d,
        scale: Some(1.0),
        scale_grid: if log {
            log_profile_grid(d)
        } else {
            GridSpec {
                eps0: 2f64.powi(-12),
                q: 0.5,
                n: 31,
            }
        },
        lambda_grid: LambdaGridSpec::default(),
        j_grid: IndexGridSpec::default(),
        bands: Bands {
            content: band,
            lengths: band,
            constant: band,
        },
    }
}
