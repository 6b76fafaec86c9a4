//! Fractal strings: non-increasing summable length sequences `l_1 ≥ l_2 ≥ … > 0`
//! with fast counting `J(ε) = max{j : l_j > ε}` and tail sums.
//!
//! Three backends cover the bundled examples:
//! explicit length lists, run-length blocks (finite or self-similar, e.g. the
//! Cantor string) and analytic profiles (`a`-strings and `l_j = L·g(j)`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{make_derived, DerivedFunctions, GaugeFunction, GaugeSpec};
use crate::numeric::{euler_maclaurin_tail, hurwitz_zeta, CompensatedSum, DoubleDouble};

/// Largest integer below which every `u64` is exactly representable as `f64`.
const EXACT_INT: f64 = 9_007_199_254_740_992.0;

/// Arithmetic used for `⌊l_j x⌋` and `{l_j x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    #[default]
    Extended,
}

impl Precision {
    /// Reads `FSTRING_PRECISION` (`double` or `extended`); defaults to extended.
    pub fn from_env() -> Result<Self> {
        match std::env::var("FSTRING_PRECISION") {
            Err(_) => Ok(Precision::Extended),
            Ok(v) => match v.trim().to_ascii_lowercase().as_str() {
                "double" => Ok(Precision::Double),
                "extended" | "" => Ok(Precision::Extended),
                other => Err(Error::Argument(format!(
                    "FSTRING_PRECISION must be 'double' or 'extended', got '{other}'"
                ))),
            },
        }
    }
}

/// JSON description of a string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StringSpec {
    Cantor {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<u32>,
    },
    AString {
        a: f64,
    },
    Profile {
        #[serde(rename = "L")]
        scale: f64,
        gauge: GaugeSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        j_max: Option<u64>,
    },
    Explicit {
        lengths: Vec<f64>,
    },
    RunLength {
        blocks: Vec<(f64, u64)>,
    },
}

/// A run of `multiplicity` equal lengths starting at index `first`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermGroup {
    pub first: u64,
    pub length: f64,
    pub multiplicity: u64,
    // exact-arithmetic hint, see `FractalString::scaled`
    exact: ExactForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ExactForm {
    /// `length` is the value to use
    Plain,
    /// `numerator / denominator` with an exactly representable integer denominator
    Ratio { numerator: f64, denominator: f64 },
}

#[derive(Debug, Clone)]
struct Block {
    length: f64,
    multiplicity: u64,
}

#[derive(Debug, Clone)]
enum Backend {
    Explicit {
        lengths: Vec<f64>,
        // suffix[m] = Σ_{j > m} l_j
        suffix: Vec<f64>,
    },
    Blocks {
        blocks: Vec<Block>,
        // count[b] = number of terms in blocks 0..b
        count: Vec<u64>,
        suffix: Vec<f64>,
    },
    /// Block `n ≥ 1` holds `mult_base^{n-1}` copies of `scale / base^n`.
    SelfSimilar {
        scale: f64,
        base: f64,
        mult_base: u64,
    },
    AString {
        a: f64,
    },
    Profile(Box<Profile>),
}

#[derive(Debug, Clone)]
struct Profile {
    scale: f64,
    derived: DerivedFunctions,
    /// First index at which `l_j = L·g(j)`; earlier terms are clamped to it.
    first_regular: u64,
    /// `1/D` when the gauge is a pure power and `g(j) = j^{-1/D}`.
    power: Option<f64>,
}

impl Profile {
    fn g(&self, j: f64) -> Result<f64> {
        match self.power {
            Some(p) => Ok(j.powf(-p)),
            None => self.derived.g(j),
        }
    }

    fn length(&self, j: u64) -> Result<f64> {
        Ok(self.scale * self.g(j.max(self.first_regular) as f64)?)
    }

    fn index_estimate(&self, eps: f64) -> f64 {
        let y = eps / self.scale;
        if y <= self.derived.monotone_upper() {
            self.derived.big_h(y).map(|h| 1.0 / h).unwrap_or(1.0)
        } else {
            1.0
        }
    }

    /// `Σ_{j ≥ k} L·g(j)` for `k ≥ first_regular`.
    fn regular_tail(&self, k: u64) -> Result<f64> {
        if let Some(p) = self.power {
            return Ok(self.scale * hurwitz_zeta(p, k as f64)?);
        }
        let rho = -1.0 / self.derived.dimension();
        let g = |x: f64| self.derived.g(x).unwrap_or(f64::NAN);
        Ok(self.scale * euler_maclaurin_tail(g, rho, k)?)
    }
}

/// Non-increasing summable sequence of positive lengths.
#[derive(Debug, Clone)]
pub struct FractalString {
    backend: Backend,
    total: f64,
    spec: StringSpec,
}

fn suffix_sums(values: impl DoubleEndedIterator<Item = f64>, n: usize) -> Vec<f64> {
    let mut suffix = vec![0.0; n + 1];
    let mut acc = CompensatedSum::new();
    for (i, v) in values.rev().enumerate() {
        acc += v;
        suffix[n - 1 - i] = acc.value();
    }
    suffix
}

impl FractalString {
    pub fn explicit(mut lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::Argument("a string needs at least one length".into()));
        }
        if lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::Argument(
                "lengths must be positive and finite".into(),
            ));
        }
        lengths.sort_by(|a, b| b.total_cmp(a));
        let suffix = suffix_sums(lengths.iter().copied(), lengths.len());
        let spec = StringSpec::Explicit {
            lengths: lengths.clone(),
        };
        Ok(FractalString {
            total: suffix[0],
            backend: Backend::Explicit { lengths, suffix },
            spec,
        })
    }

    pub fn single_interval(length: f64) -> Result<Self> {
        Self::explicit(vec![length])
    }

    /// Finite run-length string; `blocks` are `(length, multiplicity)` with
    /// strictly decreasing lengths.
    pub fn run_length(blocks: Vec<(f64, u64)>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Argument("a string needs at least one block".into()));
        }
        for w in blocks.windows(2) {
            if !(w[1].0 < w[0].0) {
                return Err(Error::Argument(
                    "run-length blocks need strictly decreasing lengths".into(),
                ));
            }
        }
        if blocks
            .iter()
            .any(|(l, m)| !(l.is_finite() && *l > 0.0) || *m == 0)
        {
            return Err(Error::Argument(
                "blocks need positive finite lengths and positive multiplicities".into(),
            ));
        }
        let spec = StringSpec::RunLength {
            blocks: blocks.clone(),
        };
        Self::from_blocks(
            blocks
                .into_iter()
                .map(|(length, multiplicity)| Block {
                    length,
                    multiplicity,
                })
                .collect(),
            spec,
        )
    }

    fn from_blocks(blocks: Vec<Block>, spec: StringSpec) -> Result<Self> {
        let mut count = Vec::with_capacity(blocks.len() + 1);
        count.push(0u64);
        for b in &blocks {
            let next = count
                .last()
                .unwrap()
                .checked_add(b.multiplicity)
                .ok_or_else(|| Error::Range("term count overflows u64".into()))?;
            count.push(next);
        }
        let suffix = suffix_sums(
            blocks.iter().map(|b| b.length * b.multiplicity as f64),
            blocks.len(),
        );
        Ok(FractalString {
            total: suffix[0],
            backend: Backend::Blocks {
                blocks,
                count,
                suffix,
            },
            spec,
        })
    }

    /// Middle-third Cantor string: `2^{n-1}` lengths `3^{-n}`, total 1.
    pub fn cantor() -> Self {
        FractalString {
            backend: Backend::SelfSimilar {
                scale: 1.0,
                base: 3.0,
                mult_base: 2,
            },
            total: 1.0,
            spec: StringSpec::Cantor { depth: None },
        }
    }

    /// Cantor string cut after the first `depth` blocks.
    pub fn cantor_depth(depth: u32) -> Result<Self> {
        Self::cantor().truncate_depth(depth)
    }

    /// `l_j = j^{-a} - (j+1)^{-a}`, total 1, `Σ_{j>m} l_j = (m+1)^{-a}`.
    pub fn a_string(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Argument(format!("a-string needs a > 0, got {a}")));
        }
        Ok(FractalString {
            backend: Backend::AString { a },
            total: 1.0,
            spec: StringSpec::AString { a },
        })
    }

    /// `l_j = L·g(j)` for `j ≥ ⌈valid_from⌉`, clamped to a constant before that.
    pub fn profile(scale: f64, derived: &DerivedFunctions, j_max: Option<u64>) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Argument(format!("profile needs L > 0, got {scale}")));
        }
        let x0 = derived.valid_from();
        if !x0.is_finite() || x0 > 1e12 {
            return Err(Error::Construction(format!(
                "profile start index {x0} cannot be resolved"
            )));
        }
        let first_regular = (x0.ceil() as u64).max(1);
        let power = derived
            .gauge()
            .is_pure_power()
            .then(|| 1.0 / derived.dimension());
        let profile = Profile {
            scale,
            derived: derived.clone(),
            first_regular,
            power,
        };
        profile.length(first_regular)?;
        let mut s = FractalString {
            backend: Backend::Profile(Box::new(profile)),
            total: f64::NAN,
            spec: StringSpec::Profile {
                scale,
                gauge: derived.gauge().spec(),
                j_max,
            },
        };
        s.total = s.tail_after(0)?;
        match j_max {
            Some(n) => {
                let mut t = s.truncate(n)?;
                t.spec = s.spec;
                Ok(t)
            }
            None => Ok(s),
        }
    }

    pub fn from_spec(spec: &StringSpec) -> Result<Self> {
        match spec {
            StringSpec::Cantor { depth: None } => Ok(Self::cantor()),
            StringSpec::Cantor { depth: Some(d) } => Self::cantor_depth(*d),
            StringSpec::AString { a } => Self::a_string(*a),
            StringSpec::Profile {
                scale,
                gauge,
                j_max,
            } => {
                let gauge = GaugeFunction::from_spec(gauge)?;
                let derived = make_derived(&gauge, 1.0 - gauge.index())?;
                Self::profile(*scale, &derived, *j_max)
            }
            StringSpec::Explicit { lengths } => Self::explicit(lengths.clone()),
            StringSpec::RunLength { blocks } => Self::run_length(blocks.clone()),
        }
    }

    pub fn spec(&self) -> &StringSpec {
        &self.spec
    }

    /// Number of lengths, `None` for infinite strings.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<u64> {
        match &self.backend {
            Backend::Explicit { lengths, .. } => Some(lengths.len() as u64),
            Backend::Blocks { count, .. } => count.last().copied(),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.len().is_some()
    }

    pub fn total_length(&self) -> f64 {
        self.total
    }

    /// `l_j`, `j ≥ 1`.
    pub fn length(&self, j: u64) -> Result<f64> {
        if j == 0 {
            return Err(Error::Range("lengths are indexed from 1".into()));
        }
        if let Some(n) = self.len() {
            if j > n {
                return Err(Error::Range(format!("index {j} beyond the {n} lengths")));
            }
        }
        match &self.backend {
            Backend::Explicit { lengths, .. } => Ok(lengths[(j - 1) as usize]),
            Backend::Blocks { blocks, count, .. } => {
                let b = count.partition_point(|&c| c < j) - 1;
                Ok(blocks[b].length)
            }
            Backend::SelfSimilar {
                scale,
                base,
                mult_base,
            } => {
                let (n, _) = self_similar_block_of(*mult_base, j)?;
                Ok(scale / base.powi(n as i32))
            }
            Backend::AString { a } => Ok(a_string_length(*a, j)),
            Backend::Profile(p) => p.length(j),
        }
    }

    /// `J(ε) = max{j : l_j > ε}` (0 when `l_1 ≤ ε`).
    pub fn count_exceeding(&self, eps: f64) -> Result<u64> {
        if !(eps > 0.0) {
            return Err(Error::Argument(format!("J(ε) needs ε > 0, got {eps}")));
        }
        match &self.backend {
            Backend::Explicit { lengths, .. } => Ok(lengths.partition_point(|&l| l > eps) as u64),
            Backend::Blocks { blocks, count, .. } => {
                let b = blocks.partition_point(|blk| blk.length > eps);
                Ok(count[b])
            }
            Backend::SelfSimilar {
                scale,
                base,
                mult_base,
            } => {
                let mut n = ((scale / eps).ln() / base.ln()).floor().max(0.0) as i64;
                while n > 0 && !(scale / base.powi(n as i32) > eps) {
                    n -= 1;
                }
                while scale / base.powi(n as i32 + 1) > eps {
                    n += 1;
                }
                self_similar_count(*mult_base, n as u64)
            }
            Backend::AString { a } => {
                let estimate = (a / eps).powf(1.0 / (a + 1.0));
                self.search_count(eps, estimate)
            }
            Backend::Profile(p) => self.search_count(eps, p.index_estimate(eps)),
        }
    }

    /// Monotone search for the last index whose length exceeds `eps`, starting near `estimate`.
    fn search_count(&self, eps: f64, estimate: f64) -> Result<u64> {
        let longer = |j: u64| -> Result<bool> { Ok(self.length(j)? > eps) };
        if !longer(1)? {
            return Ok(0);
        }
        let start = if estimate.is_finite() && estimate >= 1.0 {
            (estimate.min(1e18) as u64).max(1)
        } else {
            1
        };
        let mut lo = start;
        let mut step = 1;
        while !longer(lo)? {
            lo = lo.saturating_sub(step).max(1);
            step *= 2;
        }
        let mut hi = lo + 1;
        step = 1;
        while longer(hi)? {
            lo = hi;
            hi = hi
                .checked_add(step)
                .filter(|h| *h < 1 << 62)
                .ok_or_else(|| Error::Range(format!("J({eps}) exceeds the index range")))?;
            step *= 2;
        }
        // invariant: l_lo > eps >= l_hi
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if longer(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// `Σ_{j > m} l_j`.
    pub fn tail_after(&self, m: u64) -> Result<f64> {
        match &self.backend {
            Backend::Explicit { suffix, .. } => Ok(suffix[(m as usize).min(suffix.len() - 1)]),
            Backend::Blocks {
                blocks,
                count,
                suffix,
            } => {
                let b = count.partition_point(|&c| c <= m);
                if b > blocks.len() {
                    return Ok(0.0);
                }
                // m lies inside block b-1 (or at its end)
                let inside = count[b] - m;
                Ok(suffix[b] + inside as f64 * blocks[b - 1].length)
            }
            Backend::SelfSimilar {
                scale,
                base,
                mult_base,
            } => {
                if m == 0 {
                    return Ok(self.total);
                }
                let (n, before) = self_similar_block_of(*mult_base, m)?;
                let block_count = mult_base.pow(n - 1) as f64;
                let rest_in_block = before as f64 + block_count - m as f64;
                let ratio = *mult_base as f64 / base;
                let after_blocks = scale * ratio.powi(n as i32) / (base - *mult_base as f64);
                Ok(after_blocks + rest_in_block * scale / base.powi(n as i32))
            }
            Backend::AString { a } => Ok((m as f64 + 1.0).powf(-a)),
            Backend::Profile(p) => {
                if m + 1 >= p.first_regular {
                    p.regular_tail(m + 1)
                } else {
                    let clamped = (p.first_regular - 1 - m) as f64 * p.length(p.first_regular)?;
                    Ok(clamped + p.regular_tail(p.first_regular)?)
                }
            }
        }
    }

    /// `Σ_{j > J(ε)} l_j`.
    pub fn tail_sum_beyond(&self, eps: f64) -> Result<f64> {
        self.tail_after(self.count_exceeding(eps)?)
    }

    /// `Σ_{j ≤ n} l_j`, summed directly.
    pub fn head_sum(&self, n: u64) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        let mut seen = 0u64;
        for g in self.groups() {
            if seen >= n {
                break;
            }
            let take = g.multiplicity.min(n - seen);
            acc += g.length * take as f64;
            seen += take;
        }
        Ok(acc.value())
    }

    /// First `n` lengths as an explicit string.
    pub fn truncate(&self, n: u64) -> Result<FractalString> {
        if n == 0 {
            return Err(Error::Argument("truncation needs n ≥ 1".into()));
        }
        let n = self.len().map_or(n, |len| len.min(n));
        let mut lengths = Vec::with_capacity(n as usize);
        for g in self.groups() {
            if lengths.len() as u64 >= n {
                break;
            }
            let take = g.multiplicity.min(n - lengths.len() as u64);
            lengths.extend(std::iter::repeat_n(g.length, take as usize));
        }
        Self::explicit(lengths)
    }

    /// Keeps the first `depth` blocks of a run-length string.
    pub fn truncate_depth(&self, depth: u32) -> Result<FractalString> {
        if depth == 0 {
            return Err(Error::Argument("truncation depth must be ≥ 1".into()));
        }
        let blocks = match &self.backend {
            Backend::Blocks { blocks, .. } => blocks.iter().take(depth as usize).cloned().collect(),
            Backend::SelfSimilar { .. } => self
                .groups()
                .take(depth as usize)
                .map(|g| Block {
                    length: g.length,
                    multiplicity: g.multiplicity,
                })
                .collect(),
            _ => {
                return Err(Error::Argument(
                    "depth truncation applies to run-length strings".into(),
                ))
            }
        };
        let spec = match &self.spec {
            StringSpec::Cantor { .. } => StringSpec::Cantor { depth: Some(depth) },
            other => other.clone(),
        };
        Self::from_blocks(blocks, spec)
    }

    /// Lengths in order, grouped into runs of equal value.
    pub fn groups(&self) -> Box<dyn Iterator<Item = TermGroup> + '_> {
        match &self.backend {
            Backend::Explicit { lengths, .. } => {
                Box::new(lengths.iter().enumerate().map(|(i, &l)| TermGroup {
                    first: i as u64 + 1,
                    length: l,
                    multiplicity: 1,
                    exact: ExactForm::Plain,
                }))
            }
            Backend::Blocks { blocks, count, .. } => {
                Box::new(blocks.iter().zip(count).map(|(b, &c)| TermGroup {
                    first: c + 1,
                    length: b.length,
                    multiplicity: b.multiplicity,
                    exact: ExactForm::Plain,
                }))
            }
            &Backend::SelfSimilar {
                scale,
                base,
                mult_base,
            } => Box::new(
                (1u32..)
                    .map_while(move |n| {
                        let mult = mult_base.checked_pow(n - 1)?;
                        let first = self_similar_count(mult_base, n as u64 - 1).ok()? + 1;
                        let denominator = base.powi(n as i32);
                        Some(TermGroup {
                            first,
                            length: scale / denominator,
                            multiplicity: mult,
                            exact: if denominator < EXACT_INT {
                                ExactForm::Ratio {
                                    numerator: scale,
                                    denominator,
                                }
                            } else {
                                ExactForm::Plain
                            },
                        })
                    })
                    .take_while(|g| g.length > 0.0),
            ),
            &Backend::AString { a } => Box::new((1u64..).map(move |j| {
                let jf = j as f64;
                let exact = if a == 1.0 && jf * (jf + 1.0) < EXACT_INT {
                    ExactForm::Ratio {
                        numerator: 1.0,
                        denominator: jf * (jf + 1.0),
                    }
                } else {
                    ExactForm::Plain
                };
                TermGroup {
                    first: j,
                    length: a_string_length(a, j),
                    multiplicity: 1,
                    exact,
                }
            })),
            Backend::Profile(p) => {
                let integer_power = p
                    .power
                    .filter(|q| (q - q.round()).abs() < 1e-12)
                    .map(|q| q.round() as i32);
                Box::new((1u64..).map_while(move |j| {
                    let length = p.length(j).ok()?;
                    let jr = j.max(p.first_regular) as f64;
                    let exact = match integer_power {
                        Some(q) if jr.powi(q) < EXACT_INT => ExactForm::Ratio {
                            numerator: p.scale,
                            denominator: jr.powi(q),
                        },
                        _ => ExactForm::Plain,
                    };
                    Some(TermGroup {
                        first: j,
                        length,
                        multiplicity: 1,
                        exact,
                    })
                }))
            }
        }
    }

    /// `l·x` for one group, exact in extended mode whenever the length is a
    /// ratio with an exactly representable denominator.
    pub fn scaled(group: &TermGroup, x: f64, precision: Precision) -> DoubleDouble {
        match (precision, group.exact) {
            (Precision::Double, _) => DoubleDouble::from(group.length * x),
            (
                Precision::Extended,
                ExactForm::Ratio {
                    numerator,
                    denominator,
                },
            ) => DoubleDouble::from(x)
                .mul_f64(numerator)
                .div_f64(denominator),
            (Precision::Extended, ExactForm::Plain) => DoubleDouble::from(group.length).mul_f64(x),
        }
    }
}

fn a_string_length(a: f64, j: u64) -> f64 {
    let jf = j as f64;
    if a == 1.0 {
        1.0 / (jf * (jf + 1.0))
    } else {
        // j^{-a} (1 - (1 + 1/j)^{-a}) without cancellation
        jf.powf(-a) * -(-a * (1.0 / jf).ln_1p()).exp_m1()
    }
}

/// Terms in the first `n` self-similar blocks: `Σ_{k<n} m^k`.
fn self_similar_count(mult_base: u64, n: u64) -> Result<u64> {
    let overflow = || Error::Range(format!("term count of {n} blocks overflows u64"));
    if mult_base == 1 {
        return Ok(n);
    }
    let power = mult_base
        .checked_pow(u32::try_from(n).map_err(|_| overflow())?)
        .ok_or_else(overflow)?;
    Ok((power - 1) / (mult_base - 1))
}

/// Block `n ≥ 1` containing index `j`, and the number of terms before that block.
fn self_similar_block_of(mult_base: u64, j: u64) -> Result<(u32, u64)> {
    let mut before = 0u64;
    let mut n = 1u32;
    loop {
        let size = mult_base
            .checked_pow(n - 1)
            .ok_or_else(|| Error::Range(format!("index {j} beyond representable blocks")))?;
        if j <= before + size {
            return Ok((n, before));
        }
        before += size;
        n += 1;
    }
}
