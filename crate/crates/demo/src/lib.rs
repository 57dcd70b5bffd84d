//! Browser bindings for three scans: smallest singular values of `I - z h`,
//! homology around a circle for a diagonal self-map, and the ray-model
//! window index. Each export returns a JSON report.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use telescope_core::exact::parse_rational;
use telescope_core::fixtures::diagonal_self_map;
use telescope_core::group::GroupAlgebraMatrix;
use telescope_core::laurent::LaurentMatrix;
use telescope_core::spectral::{
    geometric_grid, index_window_experiment, lambda_circle_scan, sigma_min_scan, singular_radii, IndexModel,
    NumericalRankPolicy,
};
use telescope_core::Result;

fn parse_diagonal(values: &str) -> Result<Vec<i64>> {
    values
        .split(',')
        .map(|v| {
            v.trim().parse::<i64>().map_err(|_| telescope_core::Error::Parse { what: "integer", detail: v.trim().into() })
        })
        .collect()
}

/// `sigma_min` of the weighted truncations of `I - z h` with `h = diag(values)`.
pub fn sigma_report(values: &str, k_lo: f64, k_hi: f64, points: usize, depth: usize) -> Result<Value> {
    let h = diagonal_self_map(&parse_diagonal(values)?);
    let hm: &GroupAlgebraMatrix = &h.maps()[0];
    let n = hm.nrows();
    let m = LaurentMatrix::identity(hm.group().clone(), n).sub(&LaurentMatrix::monomial(1, hm.clone()))?;
    let grid = geometric_grid(k_lo, k_hi, points)?;
    let depths: Vec<usize> = [depth / 2, depth].into_iter().filter(|&d| d > 0).collect();
    let scan = sigma_min_scan(&m, &grid, &depths, &NumericalRankPolicy::default())?;
    Ok(json!(scan))
}

/// Homology of the torus of `diag(values)` specialized on `|lambda| = radius`.
pub fn lambda_report(values: &str, radius: &str, samples: usize) -> Result<Value> {
    let h = diagonal_self_map(&parse_diagonal(values)?);
    let r = parse_rational(radius)?;
    let scan = lambda_circle_scan(&h, telescope_core::exact::rational_to_f64(&r), samples, &NumericalRankPolicy::default())?;
    let radii = singular_radii(&h.maps()[0])?;
    Ok(json!({"scan": scan, "singular_radii": radii}))
}

/// Window index of the ray model at weight `k`, or of its dual read at `1/k`.
pub fn index_report(k: f64, depth: usize, dual: bool) -> Result<Value> {
    let depths: Vec<usize> = [depth / 2, depth].into_iter().filter(|&d| d > 0).collect();
    let scan =
        index_window_experiment(&IndexModel::ray(), &[k], &depths, dual.then_some(1), &NumericalRankPolicy::default())?;
    Ok(json!(scan))
}

fn finish(r: Result<Value>) -> std::result::Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn sigma_scan(values: &str, k_lo: f64, k_hi: f64, points: usize, depth: usize) -> std::result::Result<String, JsValue> {
    finish(sigma_report(values, k_lo, k_hi, points, depth))
}

#[wasm_bindgen]
pub fn lambda_scan(values: &str, radius: &str, samples: usize) -> std::result::Result<String, JsValue> {
    finish(lambda_report(values, radius, samples))
}

#[wasm_bindgen]
pub fn index_window(k: f64, depth: usize, dual: bool) -> std::result::Result<String, JsValue> {
    finish(index_report(k, depth, dual))
}
