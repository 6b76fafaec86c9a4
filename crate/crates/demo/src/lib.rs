//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each exported function has a plain-Rust twin (suffix `_values` / `_json`)
//! that the native tests call; the exported wrappers only convert errors.

use fstring_core::gauge::{make_derived, GaugeFunction};
use fstring_core::geometry::{boundary_count, tube_volume, ScaleGrid};
use fstring_core::harness::{cmd_zeta, delta_ratio_curve, render_json};
use fstring_core::strings::{FractalString, Precision, StringSpec};
use wasm_bindgen::prelude::*;

fn parse(spec: &str) -> Result<FractalString, String> {
    let spec: StringSpec =
        serde_json::from_str(spec).map_err(|e| format!("bad string spec: {e}"))?;
    FractalString::from_spec(&spec).map_err(|e| e.to_string())
}

/// Flattened `[ε, V(ε)/h(ε), 2J(2ε)/h'(ε)]` triples for `h = y^rho`.
pub fn content_curve_values(
    spec: &str,
    rho: f64,
    eps0: f64,
    q: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    let string = parse(spec)?;
    let gauge = GaugeFunction::power(rho, 1.0).map_err(|e| e.to_string())?;
    let grid = ScaleGrid::geometric(eps0, q, n).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * n);
    for &eps in grid.scales() {
        let v = tube_volume(&string, eps).map_err(|e| e.to_string())?;
        let count = boundary_count(&string, eps).map_err(|e| e.to_string())?;
        let h = gauge.eval_h(eps).map_err(|e| e.to_string())?;
        let dh = gauge.eval_dh(eps).map_err(|e| e.to_string())?;
        out.extend([eps, v / h, count as f64 / dh]);
    }
    Ok(out)
}

/// Flattened `[x, δ(x)/f(x)]` pairs for the gauge `y^{1−D}`.
pub fn delta_curve_values(
    spec: &str,
    dimension: f64,
    x0: f64,
    ratio: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    let string = parse(spec)?;
    let gauge = GaugeFunction::power(1.0 - dimension, 1.0).map_err(|e| e.to_string())?;
    let derived = make_derived(&gauge, dimension).map_err(|e| e.to_string())?;
    let curve = delta_ratio_curve(&string, &derived, x0, ratio, n, Precision::Extended)
        .map_err(|e| e.to_string())?;
    Ok(curve.into_iter().flat_map(|(x, r)| [x, r]).collect())
}

/// `{D, zeta_d, c1d, w_k: [{k, w_k, gap}]}` as JSON text.
pub fn zeta_json(dimension: f64) -> Result<String, String> {
    cmd_zeta(dimension)
        .map(|z| render_json(&z))
        .map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn content_curve(
    spec: &str,
    rho: f64,
    eps0: f64,
    q: f64,
    n: usize,
) -> Result<Vec<f64>, JsError> {
    content_curve_values(spec, rho, eps0, q, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn delta_curve(
    spec: &str,
    dimension: f64,
    x0: f64,
    ratio: f64,
    n: usize,
) -> Result<Vec<f64>, JsError> {
    delta_curve_values(spec, dimension, x0, ratio, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn zeta_summary(dimension: f64) -> Result<String, JsError> {
    zeta_json(dimension).map_err(|e| JsError::new(&e))
}
