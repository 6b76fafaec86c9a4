use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_GRID_POINTS: usize = 9;

/// Geometric grid `eps0 · q^k`, `k = 0..n`, strictly decreasing toward zero.
///
/// Every liminf/limsup estimate in the crate is read off the trailing third
/// of such a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    eps0: f64,
    q: f64,
    scales: Vec<f64>,
}

/// Serialized grid parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub eps0: f64,
    pub q: f64,
    pub n: usize,
}

impl ScaleGrid {
    pub fn geometric(eps0: f64, q: f64, n: usize) -> Result<Self> {
        if !(eps0 > 0.0) || !eps0.is_finite() {
            return Err(Error::Argument(format!(
                "grid start must be positive, got {eps0}"
            )));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Argument(format!(
                "grid ratio must lie in (0,1), got {q}"
            )));
        }
        if n < MIN_GRID_POINTS {
            return Err(Error::Argument(format!(
                "grid needs at least {MIN_GRID_POINTS} scales, got {n}"
            )));
        }
        let scales: Vec<f64> = (0..n).map(|k| eps0 * q.powi(k as i32)).collect();
        if !(scales[n - 1] > 0.0) {
            return Err(Error::Argument("grid underflows to zero".into()));
        }
        Ok(ScaleGrid { eps0, q, scales })
    }

    pub fn from_spec(spec: GridSpec) -> Result<Self> {
        Self::geometric(spec.eps0, spec.q, spec.n)
    }

    /// `n` scales `q^k` spanning `periods` multiplicative periods of `1/q^steps_per_period`,
    /// i.e. `q = period^{-1/steps_per_period}` with `n = periods·steps + 1`.
    pub fn periodic(
        eps0: f64,
        period: f64,
        steps_per_period: usize,
        periods: usize,
    ) -> Result<Self> {
        if !(period > 1.0) || steps_per_period == 0 {
            return Err(Error::Argument(
                "periodic grid needs period > 1 and steps > 0".into(),
            ));
        }
        let q = period.powf(-1.0 / steps_per_period as f64);
        Self::geometric(eps0, q, periods * steps_per_period + 1)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            eps0: self.eps0,
            q: self.q,
            n: self.scales.len(),
        }
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    /// First index of the trailing third.
    pub fn trailing_start(&self) -> usize {
        trailing_third_start(self.scales.len())
    }
}

pub(crate) fn trailing_third_start(n: usize) -> usize {
    n - n.div_ceil(3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_grid_is_exact_for_halves() {
        let g = ScaleGrid::geometric(2f64.powi(-10), 0.5, 31).unwrap();
        assert_eq!(g.scales()[30], 2f64.powi(-40));
        assert_eq!(g.trailing_start(), 20);
    }

    #[test]
    fn rejects_short_or_bad_grids() {
        assert!(ScaleGrid::geometric(1.0, 0.5, 8).is_err());
        assert!(ScaleGrid::geometric(1.0, 1.0, 20).is_err());
        assert!(ScaleGrid::geometric(-1.0, 0.5, 20).is_err());
    }

    #[test]
    fn periodic_grid_spans_whole_periods() {
        let g = ScaleGrid::periodic(1e-3, 3.0, 16, 5).unwrap();
        assert_eq!(g.len(), 81);
        let span = g.scales()[0] / g.scales()[80];
        assert!((span / 243.0 - 1.0).abs() < 1e-12);
    }
}
