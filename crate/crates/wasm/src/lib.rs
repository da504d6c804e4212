//! Browser bindings for the demo page in `www/`. Each export returns a flat
//! `Float64Array`; the plain functions behind them are what the tests call.

use nonlocal_core::measures::{linf_gap, LineMeasure};
use nonlocal_core::special::ball_transform;
use nonlocal_core::weights::{ConcentratingFamily, RadialWeight};
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 4000;

fn grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>, String> {
    if !(2..=MAX_POINTS).contains(&count) {
        return Err(format!("point count must lie in [2, {MAX_POINTS}], got {count}"));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(format!("need finite lo < hi, got [{lo}, {hi}]"));
    }
    Ok((0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect())
}

/// `mu_hat` of a normalized preset weight on `[0, xi_max]`.
pub fn multiplier_values(preset: &str, n: usize, param: f64, xi_max: f64, count: usize) -> Result<Vec<f64>, String> {
    let w = RadialWeight::preset(preset, n, param)
        .and_then(|w| w.normalize())
        .map_err(|e| e.to_string())?;
    grid(0.0, xi_max, count)?
        .into_iter()
        .map(|xi| w.mu_hat(xi).map(|v| v.value).map_err(|e| e.to_string()))
        .collect()
}

/// `G_r(xi)` on `[0, xi_max]`.
pub fn ball_transform_values(n: usize, radius: f64, xi_max: f64, count: usize) -> Result<Vec<f64>, String> {
    grid(0.0, xi_max, count)?
        .into_iter()
        .map(|xi| ball_transform(n, radius, xi).map_err(|e| e.to_string()))
        .collect()
}

/// Annulus localization of `(|t|)' = sign t` on `[-3 eps, 3 eps]`, followed by
/// the sampled sup-norm gap as the last entry.
pub fn linf_profile_values(eps: f64, count: usize) -> Result<Vec<f64>, String> {
    let gap = linf_gap(eps).map_err(|e| e.to_string())?;
    let mu = LineMeasure::from_density_fn(-1.0, 1.0, 2000, 1, |x, o| o[0] = x.signum()).map_err(|e| e.to_string())?;
    let w = ConcentratingFamily::Annulus { n: 1 }.member(eps).map_err(|e| e.to_string())?;
    let mut out = grid(-3.0 * eps, 3.0 * eps, count)?
        .into_iter()
        .map(|t| mu.radial_of_measure(&w, t).map(|v| v[0]).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    out.push(gap.gap);
    Ok(out)
}

#[wasm_bindgen]
pub fn multiplier_curve(preset: &str, n: usize, param: f64, xi_max: f64, count: usize) -> Result<Vec<f64>, JsValue> {
    multiplier_values(preset, n, param, xi_max, count).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn ball_transform_curve(n: usize, radius: f64, xi_max: f64, count: usize) -> Result<Vec<f64>, JsValue> {
    ball_transform_values(n, radius, xi_max, count).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn linf_profile(eps: f64, count: usize) -> Result<Vec<f64>, JsValue> {
    linf_profile_values(eps, count).map_err(|e| JsValue::from_str(&e))
}
