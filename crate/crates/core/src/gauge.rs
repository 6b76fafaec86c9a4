//! Gauge functions regularly varying at zero, their elasticities, and the
//! derived maps `H(y) = y / h(y)`, `H⁻¹`, `f(x) = x·h(1/x)`, `g(x) = H⁻¹(1/x)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied gauge with an optional analytic derivative.
#[derive(Clone)]
pub struct CustomGauge {
    pub label: String,
    pub h: ScalarFn,
    pub dh: Option<ScalarFn>,
}

impl fmt::Debug for CustomGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomGauge")
            .field("label", &self.label)
            .field("has_derivative", &self.dh.is_some())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum GaugeForm {
    /// `y^rho · Π_i L_i(y)^{alpha_i}` with `L_1 = ln(1/y)` and `L_{i+1} = ln L_i`.
    PowerLog {
        log_exponents: Vec<f64>,
    },
    Custom(CustomGauge),
}

/// JSON form of a gauge. Custom gauges serialize for reporting but cannot be
/// rebuilt from JSON since their evaluators are code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum GaugeSpec {
    Powerlog {
        rho: f64,
        #[serde(default)]
        log_exponents: Vec<f64>,
        domain_upper: f64,
    },
    Custom {
        rho: f64,
        domain_upper: f64,
        label: String,
    },
}

/// A positive gauge `h` on `(0, domain_upper]` with regular-variation index `index`.
#[derive(Debug, Clone)]
pub struct GaugeFunction {
    index: f64,
    domain_upper: f64,
    form: GaugeForm,
}

impl GaugeFunction {
    pub fn power_log(rho: f64, log_exponents: Vec<f64>, domain_upper: f64) -> Result<Self> {
        if !rho.is_finite() || log_exponents.iter().any(|a| !a.is_finite()) {
            return Err(Error::Argument("gauge parameters must be finite".into()));
        }
        if !(domain_upper > 0.0) || !domain_upper.is_finite() {
            return Err(Error::Argument(format!(
                "domain_upper must be positive and finite, got {domain_upper}"
            )));
        }
        // every iterated logarithm must be positive at the top of the domain
        let mut level = (1.0 / domain_upper).ln();
        for (i, _) in log_exponents.iter().enumerate() {
            if !(level > 0.0) {
                return Err(Error::Argument(format!(
                    "iterated logarithm L_{} is not positive at domain_upper = {domain_upper}",
                    i + 1
                )));
            }
            level = level.ln();
        }
        Ok(GaugeFunction {
            index: rho,
            domain_upper,
            form: GaugeForm::PowerLog { log_exponents },
        })
    }

    /// Pure power `y^rho` on `(0, domain_upper]`.
    pub fn power(rho: f64, domain_upper: f64) -> Result<Self> {
        Self::power_log(rho, Vec::new(), domain_upper)
    }

    pub fn custom(index: f64, domain_upper: f64, gauge: CustomGauge) -> Result<Self> {
        if !index.is_finite() || !(domain_upper > 0.0) || !domain_upper.is_finite() {
            return Err(Error::Argument(
                "custom gauge needs a finite index and a positive finite domain".into(),
            ));
        }
        Ok(GaugeFunction {
            index,
            domain_upper,
            form: GaugeForm::Custom(gauge),
        })
    }

    pub fn from_spec(spec: &GaugeSpec) -> Result<Self> {
        match spec {
            GaugeSpec::Powerlog {
                rho,
                log_exponents,
                domain_upper,
            } => Self::power_log(*rho, log_exponents.clone(), *domain_upper),
            GaugeSpec::Custom { label, .. } => Err(Error::Argument(format!(
                "custom gauge '{label}' cannot be rebuilt from JSON"
            ))),
        }
    }

    pub fn spec(&self) -> GaugeSpec {
        match &self.form {
            GaugeForm::PowerLog { log_exponents } => GaugeSpec::Powerlog {
                rho: self.index,
                log_exponents: log_exponents.clone(),
                domain_upper: self.domain_upper,
            },
            GaugeForm::Custom(c) => GaugeSpec::Custom {
                rho: self.index,
                domain_upper: self.domain_upper,
                label: c.label.clone(),
            },
        }
    }

    pub fn index(&self) -> f64 {
        self.index
    }

    pub fn domain_upper(&self) -> f64 {
        self.domain_upper
    }

    pub fn form(&self) -> &GaugeForm {
        &self.form
    }

    /// True for `y^rho` without logarithmic factors.
    pub fn is_pure_power(&self) -> bool {
        matches!(&self.form, GaugeForm::PowerLog { log_exponents } if log_exponents.iter().all(|&a| a == 0.0))
    }

    fn check_domain(&self, y: f64) -> Result<()> {
        if y > 0.0 && y <= self.domain_upper {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "y = {y} outside (0, {}]",
                self.domain_upper
            )))
        }
    }

    pub fn eval_h(&self, y: f64) -> Result<f64> {
        self.check_domain(y)?;
        let v = match &self.form {
            GaugeForm::PowerLog { log_exponents } => {
                let mut v = y.powf(self.index);
                let mut level = (1.0 / y).ln();
                for &alpha in log_exponents {
                    if alpha != 0.0 {
                        v *= level.powf(alpha);
                    }
                    level = level.ln();
                }
                v
            }
            GaugeForm::Custom(c) => (c.h)(y),
        };
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::Evaluation(format!(
                "h({y}) = {v} is not a positive finite value"
            )))
        }
    }

    pub fn eval_dh(&self, y: f64) -> Result<f64> {
        self.check_domain(y)?;
        match &self.form {
            GaugeForm::PowerLog { .. } => Ok(self.eval_h(y)? * self.power_log_elasticity(y) / y),
            GaugeForm::Custom(c) => {
                let d = match &c.dh {
                    Some(dh) => dh(y),
                    None => richardson_derivative(&*c.h, y),
                };
                if d.is_finite() {
                    Ok(d)
                } else {
                    Err(Error::Evaluation(format!("h'({y}) is not finite")))
                }
            }
        }
    }

    /// `E_h(y) = y·h'(y)/h(y)`; tends to the index as `y → 0`.
    pub fn elasticity(&self, y: f64) -> Result<f64> {
        self.check_domain(y)?;
        match &self.form {
            GaugeForm::PowerLog { .. } => Ok(self.power_log_elasticity(y)),
            GaugeForm::Custom(_) => Ok(y * self.eval_dh(y)? / self.eval_h(y)?),
        }
    }

    // rho + Σ alpha_i · y L_i'(y) / L_i(y), where y L_1' = -1 and
    // y L_{i+1}' = y L_i' / L_i.
    fn power_log_elasticity(&self, y: f64) -> f64 {
        let GaugeForm::PowerLog { log_exponents } = &self.form else {
            unreachable!("only called for power-log gauges")
        };
        let mut e = self.index;
        let mut level = (1.0 / y).ln();
        let mut y_dlevel = -1.0;
        for &alpha in log_exponents {
            e += alpha * y_dlevel / level;
            y_dlevel /= level;
            level = level.ln();
        }
        e
    }

    /// Geometric grid of `n` points from `domain_upper` down to `domain_upper·10^{-decades}`.
    fn probe_grid(&self, n: usize, decades: f64) -> Vec<f64> {
        let ratio = 10f64.powf(-decades / (n - 1) as f64);
        (0..n)
            .map(|i| self.domain_upper * ratio.powi(i as i32))
            .collect()
    }

    /// (H1): continuity and strict monotonicity on the grid, `h → 0` and
    /// `h(y)/y → ∞` as `y → 0`. The behaviour at infinity lies outside the
    /// trusted domain and is not sampled.
    pub fn check_h1(&self) -> Result<ConditionReport> {
        let grid = self.probe_grid(64, 24.0);
        let mut values = Vec::with_capacity(grid.len());
        for &y in &grid {
            values.push(self.eval_h(y)?);
        }
        // grid is decreasing, so h must be strictly decreasing along it
        let violations = values.windows(2).filter(|w| !(w[1] < w[0])).count();
        let last = grid.len() - 1;
        let h_to_zero = values[last] < values[0] && values[last] < 1e-3 * values[0].max(1.0);
        let quotient: Vec<f64> = grid.iter().zip(&values).map(|(y, h)| h / y).collect();
        let quotient_grows = quotient.windows(2).rev().take(16).all(|w| w[1] > w[0]);
        let mut notes = Vec::new();
        if !h_to_zero {
            notes.push("h(y) does not trend to 0 on the grid".to_string());
        }
        if !quotient_grows {
            notes.push("h(y)/y does not grow on the trailing grid".to_string());
        }
        notes.push("limit of h at infinity is outside the trusted domain; not sampled".to_string());
        Ok(ConditionReport {
            condition: Condition::H1,
            satisfied: violations == 0 && h_to_zero && quotient_grows,
            worst_defect: violations as f64,
            violations,
            samples: grid.len(),
            per_scale: grid
                .iter()
                .zip(&quotient)
                .map(|(&y, &q)| ScaleDefect { y, defect: q })
                .collect(),
            notes,
        })
    }

    /// (H2): `sup_t |h(ty)/h(y) - t^rho|` per `y`; satisfied when the defect
    /// does not grow as `y` decreases.
    pub fn check_h2(&self, t_grid: &[f64], y_grid: &[f64]) -> Result<ConditionReport> {
        check_grids(t_grid, y_grid)?;
        let mut per_scale = Vec::with_capacity(y_grid.len());
        let mut skipped = 0;
        for &y in y_grid {
            let hy = self.eval_h(y)?;
            let mut worst: f64 = 0.0;
            for &t in t_grid {
                if t * y > self.domain_upper {
                    skipped += 1;
                    continue;
                }
                let d = (self.eval_h(t * y)? / hy - t.powf(self.index)).abs();
                worst = worst.max(d);
            }
            per_scale.push(ScaleDefect { y, defect: worst });
        }
        let order = sorted_by_decreasing_y(&per_scale);
        let violations = order
            .windows(2)
            .filter(|w| w[1].defect > w[0].defect * (1.0 + 1e-9) + 1e-15)
            .count();
        let worst_defect = per_scale.iter().map(|s| s.defect).fold(0.0, f64::max);
        let mut notes = Vec::new();
        if skipped > 0 {
            notes.push(format!(
                "{skipped} (t, y) pairs left the domain and were skipped"
            ));
        }
        Ok(ConditionReport {
            condition: Condition::H2,
            satisfied: violations == 0,
            worst_defect,
            violations,
            samples: t_grid.len() * y_grid.len() - skipped,
            per_scale,
            notes,
        })
    }

    /// (H3): smallest observed `h(ty)/h(y) · t^{-tau} / m`; satisfied when it is at least 1.
    pub fn check_h3(
        &self,
        tau: f64,
        m: f64,
        t_grid: &[f64],
        y_grid: &[f64],
    ) -> Result<ConditionReport> {
        check_grids(t_grid, y_grid)?;
        if !(tau > 0.0 && tau < 1.0) || !(m > 0.0) {
            return Err(Error::Argument(format!(
                "H3 needs tau in (0,1) and m > 0, got tau = {tau}, m = {m}"
            )));
        }
        let mut per_scale = Vec::with_capacity(y_grid.len());
        let mut violations = 0;
        let mut samples = 0;
        for &y in y_grid {
            let hy = self.eval_h(y)?;
            let mut worst = f64::INFINITY;
            for &t in t_grid.iter().filter(|&&t| t <= 1.0) {
                let q = self.eval_h(t * y)? / hy * t.powf(-tau) / m;
                samples += 1;
                if q < 1.0 - 1e-12 {
                    violations += 1;
                }
                worst = worst.min(q);
            }
            per_scale.push(ScaleDefect { y, defect: worst });
        }
        if samples == 0 {
            return Err(Error::Argument("H3 needs t values in (0, 1]".into()));
        }
        let worst_defect = per_scale
            .iter()
            .map(|s| s.defect)
            .fold(f64::INFINITY, f64::min);
        Ok(ConditionReport {
            condition: Condition::H3,
            satisfied: violations == 0,
            worst_defect,
            violations,
            samples,
            per_scale,
            notes: Vec::new(),
        })
    }
}

fn richardson_derivative(h: &dyn Fn(f64) -> f64, y: f64) -> f64 {
    let step = y * 1e-5;
    let central = |s: f64| (h(y + s) - h(y - s)) / (2.0 * s);
    let coarse = central(step);
    let fine = central(0.5 * step);
    (4.0 * fine - coarse) / 3.0
}

fn check_grids(t_grid: &[f64], y_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() || y_grid.is_empty() {
        return Err(Error::Argument(
            "condition checks need non-empty grids".into(),
        ));
    }
    if t_grid
        .iter()
        .chain(y_grid)
        .any(|v| !(v.is_finite() && *v > 0.0))
    {
        return Err(Error::Argument(
            "grid values must be positive and finite".into(),
        ));
    }
    Ok(())
}

fn sorted_by_decreasing_y(per_scale: &[ScaleDefect]) -> Vec<ScaleDefect> {
    let mut v = per_scale.to_vec();
    v.sort_by(|a, b| b.y.total_cmp(&a.y));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    H1,
    H2,
    H3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleDefect {
    pub y: f64,
    pub defect: f64,
}

/// Grid diagnostics for one of the gauge conditions; evidence, not proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub satisfied: bool,
    pub worst_defect: f64,
    pub violations: usize,
    pub samples: usize,
    pub per_scale: Vec<ScaleDefect>,
    pub notes: Vec<String>,
}

/// `H`, `H⁻¹`, `f` and `g` for a gauge of index `1 - D`.
#[derive(Debug, Clone)]
pub struct DerivedFunctions {
    gauge: GaugeFunction,
    dimension: f64,
    monotone_upper: f64,
    valid_from: f64,
}

const MONOTONE_SCAN_POINTS: usize = 64;
const MONOTONE_SCAN_DECADES: f64 = 24.0;

pub fn make_derived(gauge: &GaugeFunction, dimension: f64) -> Result<DerivedFunctions> {
    if !(dimension > 0.0 && dimension < 1.0) {
        return Err(Error::Argument(format!(
            "dimension must lie in (0,1), got {dimension}"
        )));
    }
    if (gauge.index() - (1.0 - dimension)).abs() > 1e-12 {
        return Err(Error::Argument(format!(
            "gauge index {} does not equal 1 - D = {}",
            gauge.index(),
            1.0 - dimension
        )));
    }
    // H' > 0 exactly when the elasticity of h is below 1; scan upward from the
    // smallest scale and keep the largest prefix on which that holds.
    let mut grid = gauge.probe_grid(MONOTONE_SCAN_POINTS, MONOTONE_SCAN_DECADES);
    grid.reverse();
    let mut monotone_upper = None;
    for &y in &grid {
        let ok = gauge.eval_h(y).is_ok() && matches!(gauge.elasticity(y), Ok(e) if e < 1.0);
        if ok {
            monotone_upper = Some(y);
        } else {
            break;
        }
    }
    let Some(monotone_upper) = monotone_upper else {
        return Err(Error::Construction(format!(
            "y / h(y) is not increasing at the smallest probed scale {:e}; elasticity there is {:?}",
            grid[0],
            gauge.elasticity(grid[0])
        )));
    };
    let h_at_top = monotone_upper / gauge.eval_h(monotone_upper)?;
    let valid_from = (1.0 / gauge.domain_upper()).max(1.0 / h_at_top);
    Ok(DerivedFunctions {
        gauge: gauge.clone(),
        dimension,
        monotone_upper,
        valid_from,
    })
}

impl DerivedFunctions {
    pub fn gauge(&self) -> &GaugeFunction {
        &self.gauge
    }

    pub fn dimension(&self) -> f64 {
        self.dimension
    }

    /// Upper end of the detected interval on which `H` is strictly increasing.
    pub fn monotone_upper(&self) -> f64 {
        self.monotone_upper
    }

    /// Both `f` and `g` are defined on `[valid_from, ∞)`.
    pub fn valid_from(&self) -> f64 {
        self.valid_from
    }

    pub fn big_h(&self, y: f64) -> Result<f64> {
        Ok(y / self.gauge.eval_h(y)?)
    }

    /// Inverse of `H` on `(0, monotone_upper]`.
    pub fn big_h_inv(&self, z: f64) -> Result<f64> {
        let top = self.big_h(self.monotone_upper)?;
        if !(z > 0.0) || z > top * (1.0 + 1e-15) {
            return Err(Error::Domain(format!(
                "H⁻¹ argument {z} outside (0, {top}]"
            )));
        }
        if self.gauge.is_pure_power() {
            // H(y) = y^D
            return Ok(z.powf(1.0 / self.dimension).min(self.monotone_upper));
        }
        self.solve_big_h(z, top)
    }

    // Illinois regula falsi on t ↦ ln H(e^t) - ln z, which is increasing and
    // close to linear with slope D.
    fn solve_big_h(&self, z: f64, top: f64) -> Result<f64> {
        let ln_z = z.ln();
        let phi = |t: f64| -> Result<f64> { Ok(self.big_h(t.exp())?.ln() - ln_z) };
        let mut b = self.monotone_upper.ln();
        let mut fb = top.ln() - ln_z;
        if fb <= 0.0 {
            return Ok(self.monotone_upper);
        }
        let guess = b - fb / self.dimension;
        let mut step = 1.0;
        let mut a = guess - step;
        let mut fa = phi(a)?;
        while fa > 0.0 {
            b = a;
            fb = fa;
            step *= 2.0;
            a = guess - step;
            if a < -745.0 {
                return Err(Error::Domain(format!(
                    "H⁻¹({z}) lies below the smallest positive double"
                )));
            }
            fa = phi(a)?;
        }
        if fa == 0.0 {
            return Ok(a.exp());
        }
        let mut side = 0i8;
        let mut c = 0.5 * (a + b);
        for _ in 0..200 {
            c = (a * fb - b * fa) / (fb - fa);
            if !(c > a && c < b) {
                c = 0.5 * (a + b);
            }
            let fc = phi(c)?;
            if fc.abs() < 1e-15 || (b - a) < 1e-14 * (1.0 + c.abs()) {
                break;
            }
            if fc > 0.0 {
                b = c;
                fb = fc;
                if side == -1 {
                    fa *= 0.5;
                }
                side = -1;
            } else {
                a = c;
                fa = fc;
                if side == 1 {
                    fb *= 0.5;
                }
                side = 1;
            }
        }
        Ok(c.exp())
    }

    /// `f(x) = x·h(1/x) = 1 / H(1/x)`.
    pub fn f(&self, x: f64) -> Result<f64> {
        if x < self.valid_from {
            return Err(Error::Domain(format!(
                "f({x}) requested below valid_from = {}",
                self.valid_from
            )));
        }
        Ok(x * self.gauge.eval_h(1.0 / x)?)
    }

    /// `g(x) = H⁻¹(1/x)`.
    pub fn g(&self, x: f64) -> Result<f64> {
        if x < self.valid_from {
            return Err(Error::Domain(format!(
                "g({x}) requested below valid_from = {}",
                self.valid_from
            )));
        }
        self.big_h_inv(1.0 / x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn sqrt_log() -> GaugeFunction {
        GaugeFunction::power_log(0.5, vec![1.0], E.powi(-2)).unwrap()
    }

    #[test]
    fn eval_h_examples() {
        let sqrt = GaugeFunction::power(0.5, 1.0).unwrap();
        assert_eq!(sqrt.eval_h(0.25).unwrap(), 0.5);
        let v = sqrt_log().eval_h((-4.0f64).exp()).unwrap();
        assert!((v - E.powi(-2) * 4.0).abs() < 1e-15);
        assert!((v - 0.541_341).abs() < 1e-6);
        let id = GaugeFunction::power(1.0, 1.0).unwrap();
        assert_eq!(id.eval_h(0.7).unwrap(), 0.7);
    }

    #[test]
    fn eval_h_rejects_out_of_domain() {
        let g = GaugeFunction::power(0.5, 0.5).unwrap();
        assert!(matches!(g.eval_h(0.0), Err(Error::Domain(_))));
        assert!(matches!(g.eval_h(-1.0), Err(Error::Domain(_))));
        assert!(matches!(g.eval_h(0.6), Err(Error::Domain(_))));
    }

    #[test]
    fn power_log_domain_must_keep_logs_positive() {
        assert!(GaugeFunction::power_log(0.5, vec![1.0], 1.5).is_err());
        // L_2 = ln ln(1/y) needs ln(1/y) > 1
        assert!(GaugeFunction::power_log(0.5, vec![0.0, 1.0], 0.5).is_err());
        assert!(GaugeFunction::power_log(0.5, vec![0.0, 1.0], 0.1).is_ok());
    }

    #[test]
    fn eval_dh_examples() {
        let sqrt = GaugeFunction::power(0.5, 1.0).unwrap();
        assert!((sqrt.eval_dh(0.25).unwrap() - 1.0).abs() < 1e-15);
        // oracle: h'(y) = y^{-1/2} (ln(1/y)/2 - 1)
        let y = (-4.0f64).exp();
        let oracle = y.powf(-0.5) * (0.5 * 4.0 - 1.0);
        let d = sqrt_log().eval_dh(y).unwrap();
        assert!((d - oracle).abs() < 1e-14);
        assert!((d - 7.389_056).abs() < 1e-6);
        let id = GaugeFunction::power(1.0, 1.0).unwrap();
        assert!((id.eval_dh(0.3).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn elasticity_examples() {
        let p = GaugeFunction::power(0.37, 1.0).unwrap();
        assert_eq!(p.elasticity(1e-7).unwrap(), 0.37);
        let g = sqrt_log();
        assert!((g.elasticity((-100.0f64).exp()).unwrap() - 0.49).abs() < 1e-15);
        assert!((g.elasticity((-10.0f64).exp()).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn custom_gauge_derivative_fallback() {
        let custom = CustomGauge {
            label: "sqrt-log".into(),
            h: Arc::new(|y: f64| y.sqrt() * (1.0 / y).ln()),
            dh: None,
        };
        let g = GaugeFunction::custom(0.5, E.powi(-2), custom).unwrap();
        let y = (-4.0f64).exp();
        let d = g.eval_dh(y).unwrap();
        assert!(((d - E.powi(2)) / E.powi(2)).abs() < 1e-8, "{d}");
        assert!((g.elasticity(y).unwrap() - 0.25).abs() < 1e-8);
    }

    #[test]
    fn custom_gauge_non_finite_derivative_is_an_error() {
        let custom = CustomGauge {
            label: "bad".into(),
            h: Arc::new(|y: f64| if y > 0.1 { f64::NAN } else { y }),
            dh: None,
        };
        let g = GaugeFunction::custom(1.0, 0.1, custom).unwrap();
        assert!(matches!(g.eval_dh(0.1), Err(Error::Evaluation(_))));
    }

    #[test]
    fn derived_functions_for_square_root() {
        let d = make_derived(&GaugeFunction::power(0.5, 1.0).unwrap(), 0.5).unwrap();
        assert!((d.g(100.0).unwrap() - 1e-4).abs() < 1e-19);
        assert!((d.f(1e4).unwrap() - 100.0).abs() < 1e-12);
        assert_eq!(d.valid_from(), 1.0);
    }

    #[test]
    fn derived_inverse_consistency_with_log() {
        let d = make_derived(&sqrt_log(), 0.5).unwrap();
        let x = 1e6;
        let y = d.g(x).unwrap();
        assert!((d.big_h(y).unwrap() * x - 1.0).abs() < 1e-10);
        // oracle: y solves sqrt(y) / ln(1/y) = 1/x
        assert!((y.sqrt() / (1.0 / y).ln() * x - 1.0).abs() < 1e-10);
    }

    #[test]
    fn make_derived_rejects_bad_dimensions() {
        let g = GaugeFunction::power(0.5, 1.0).unwrap();
        assert!(make_derived(&g, 0.3).is_err());
        let zero = GaugeFunction::power(0.0, 1.0).unwrap();
        assert!(make_derived(&zero, 1.0).is_err());
        // an index-zero gauge is still usable on its own
        assert!(zero.elasticity(0.5).is_ok());
    }

    #[test]
    fn make_derived_shrinks_to_monotone_part() {
        // h(y) = y^{1/2}·(ln 1/y)^{-3} has elasticity 1/2 + 3/ln(1/y), which
        // exceeds 1 for y > e^{-6}
        let g = GaugeFunction::power_log(0.5, vec![-3.0], 0.5).unwrap();
        let d = make_derived(&g, 0.5).unwrap();
        assert!(d.monotone_upper() < (-6.0f64).exp());
        assert!(g.elasticity(d.monotone_upper()).unwrap() < 1.0);
    }

    #[test]
    fn h2_defect_power_is_zero() {
        let g = GaugeFunction::power(0.5, 1.0).unwrap();
        let t: Vec<f64> = (0..=8).map(|i| 0.5 * 2f64.powf(i as f64 / 4.0)).collect();
        let y: Vec<f64> = (1..20).map(|k| 0.5f64.powi(k)).collect();
        let r = g.check_h2(&t, &y).unwrap();
        assert!(r.satisfied);
        assert!(r.worst_defect < 1e-15);
    }

    #[test]
    fn h2_defect_log_decreases_like_oracle() {
        let g = GaugeFunction::power_log(0.5, vec![1.0], 1e-3).unwrap();
        let t: Vec<f64> = (0..=16).map(|i| 0.5 * 2f64.powf(i as f64 / 8.0)).collect();
        let y: Vec<f64> = (10..=40).map(|k| (-(k as f64)).exp()).collect();
        let r = g.check_h2(&t, &y).unwrap();
        assert!(r.satisfied);
        for s in &r.per_scale {
            let ln_inv_y = -s.y.ln();
            // ratio oracle √t (1 + ln(1/t)/ln(1/y)), deviation √t |ln t| / ln(1/y)
            let oracle = t
                .iter()
                .map(|&t| t.sqrt() * t.ln().abs() / ln_inv_y)
                .fold(0.0, f64::max);
            assert!(
                (s.defect - oracle).abs() < 1e-12,
                "{} vs {oracle}",
                s.defect
            );
        }
    }

    #[test]
    fn h3_square_root_tau_point_six() {
        let g = GaugeFunction::power(0.5, 1.0).unwrap();
        let t: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
        let y: Vec<f64> = (1..10).map(|k| 0.5f64.powi(k)).collect();
        let r = g.check_h3(0.6, 1.0, &t, &y).unwrap();
        assert!(r.satisfied);
        assert!(r.worst_defect >= 1.0);
        let bad = g.check_h3(0.4, 1.0, &t, &y).unwrap();
        assert!(!bad.satisfied);
    }

    #[test]
    fn h1_for_power_and_empty_grid_errors() {
        let g = GaugeFunction::power(0.5, 1.0).unwrap();
        assert!(g.check_h1().unwrap().satisfied);
        let id = GaugeFunction::power(1.0, 1.0).unwrap();
        // h(y)/y is constant
        assert!(!id.check_h1().unwrap().satisfied);
        assert!(matches!(g.check_h2(&[], &[0.1]), Err(Error::Argument(_))));
        assert!(matches!(
            g.check_h3(0.6, 1.0, &[0.5], &[]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn spec_json_round_trip() {
        let text = r#"{"form":"powerlog","rho":0.5,"log_exponents":[1.0],"domain_upper":0.1}"#;
        let spec: GaugeSpec = serde_json::from_str(text).unwrap();
        let g = GaugeFunction::from_spec(&spec).unwrap();
        assert_eq!(serde_json::to_string(&g.spec()).unwrap(), text);
    }
}
