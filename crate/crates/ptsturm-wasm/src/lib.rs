//! Browser bindings for the spectral toolkit: three interactive operations
//! feeding the static demo page in `www/`.
//!
//! Payloads are JSON strings so the page needs no binding glue beyond
//! `JSON.parse`. The integrator runs at a display-grade tolerance; the
//! full-precision pipeline lives behind the CLI.

use num_complex::Complex64;
use ptsturm::coeff::{make_piecewise_linear, make_sine, CoefficientProfile};
use ptsturm::shoot::OdeOptions;
use ptsturm::{spectrum, verify};
use wasm_bindgen::prelude::*;

/// Display-grade integrator tolerance: plenty for pixels, much faster than
/// the certification default.
const DEMO_RTOL: f64 = 1e-8;

fn profile(kind: &str, eps: f64) -> Result<CoefficientProfile, String> {
    let p = match kind {
        "sine" => make_sine(eps),
        "piecewise_linear" => make_piecewise_linear(eps),
        other => {
            return Err(format!(
                "unknown profile '{other}' (use sine or piecewise_linear)"
            ))
        }
    };
    p.map_err(|e| e.to_string())
}

fn opts() -> OdeOptions {
    OdeOptions::with_rtol(DEMO_RTOL)
}

fn rho_map_impl(
    kind: &str,
    eps: f64,
    radii: usize,
    angles: usize,
    r_max: f64,
) -> Result<String, String> {
    let p = profile(kind, eps)?;
    let o = opts();
    let alphas: Vec<f64> = spectrum::find_alphas(&p, 8, &o)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|a| a.alpha)
        .collect();
    let r_max = if r_max > 0.0 { r_max } else { 0.9 * alphas[5] };
    let (radii, angles) = (radii.clamp(4, 24), angles.clamp(8, 96));
    let cells = verify::sector_grid(&p, radii, angles, r_max, &alphas, &o)
        .map_err(|e| e.to_string())?;
    let cells_json: Vec<serde_json::Value> = cells
        .iter()
        .map(|c| {
            serde_json::json!({
                "re": c.z.re,
                "im": c.z.im,
                "modulus": if c.flagged { serde_json::Value::Null } else { c.modulus.into() },
                "sector": c.sector.as_str(),
                "flagged": c.flagged,
            })
        })
        .collect();
    let payload = serde_json::json!({
        "r_max": r_max,
        "radii": radii,
        "angles": angles,
        "alphas": alphas,
        "cells": cells_json,
    });
    Ok(payload.to_string())
}

fn real_eigs_impl(kind: &str, eps: f64, count: usize) -> Result<String, String> {
    let p = profile(kind, eps)?;
    let eigs = spectrum::find_real_eigs(&p, (0.0, 1e4), count.clamp(1, 10), &opts())
        .map_err(|e| e.to_string())?;
    let rows: Vec<serde_json::Value> = eigs
        .iter()
        .map(|e| serde_json::json!({"n": e.n, "lambda": e.lambda, "residual": e.residual}))
        .collect();
    Ok(serde_json::json!({"trivial_zero": true, "eigs": rows}).to_string())
}

fn alpha_curve_impl(
    kind: &str,
    eps: f64,
    count: usize,
    samples: usize,
) -> Result<String, String> {
    let p = profile(kind, eps)?;
    let o = opts();
    let zeros = spectrum::find_alphas(&p, count.clamp(1, 10), &o).map_err(|e| e.to_string())?;
    let r_max = zeros.last().map(|z| 1.15 * z.r).unwrap_or(1.0);
    let n = samples.clamp(16, 400);
    let mut curve = Vec::with_capacity(n);
    for k in 0..n {
        let r = r_max * (k as f64 + 0.5) / n as f64;
        let v = ptsturm::shoot::phi_pi_value(&p, Complex64::new(0.0, -r), &o)
            .map_err(|e| e.to_string())?;
        curve.push(serde_json::json!([r, v.re]));
    }
    let zeros_json: Vec<serde_json::Value> = zeros
        .iter()
        .map(|z| serde_json::json!({"n": z.n, "alpha": z.alpha, "r": z.r}))
        .collect();
    Ok(serde_json::json!({"samples": curve, "zeros": zeros_json}).to_string())
}

/// |rho(z)| on a polar grid with the located zeros alpha_n.
///
/// JSON: { r_max, radii, angles, alphas: [..],
///         cells: [{re, im, modulus, sector, flagged}] }
#[wasm_bindgen]
pub fn rho_map_json(
    kind: &str,
    eps: f64,
    radii: usize,
    angles: usize,
    r_max: f64,
) -> Result<String, JsValue> {
    rho_map_impl(kind, eps, radii, angles, r_max).map_err(|e| JsValue::from_str(&e))
}

/// The lowest real eigenvalue pairs with residuals.
///
/// JSON: { trivial_zero: true, eigs: [{n, lambda, residual}] }
#[wasm_bindgen]
pub fn real_eigs_json(kind: &str, eps: f64, count: usize) -> Result<String, JsValue> {
    real_eigs_impl(kind, eps, count).map_err(|e| JsValue::from_str(&e))
}

/// phi(pi, -i r) sampled on (0, r_max] together with its zeros r_n = alpha_n^2.
/// The sign changes of this real curve are exactly the zeros of phi(pi, .)
/// on the negative imaginary axis.
///
/// JSON: { samples: [[r, phi]], zeros: [{n, alpha, r}] }
#[wasm_bindgen]
pub fn alpha_curve_json(
    kind: &str,
    eps: f64,
    count: usize,
    samples: usize,
) -> Result<String, JsValue> {
    alpha_curve_impl(kind, eps, count, samples).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payloads_parse() {
        let s = real_eigs_impl("sine", 0.5, 2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["eigs"].as_array().unwrap().len(), 2);

        let s = alpha_curve_impl("piecewise_linear", 0.5, 2, 32).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["samples"].as_array().unwrap().len(), 32);
        assert_eq!(v["zeros"].as_array().unwrap().len(), 2);

        let s = rho_map_impl("sine", 0.5, 6, 16, 0.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["cells"].as_array().unwrap().len(), 6 * 16);
    }

    #[test]
    fn unknown_profile_rejected() {
        assert!(profile("hat", 0.5).is_err());
        assert!(real_eigs_impl("sine", 2.5, 2).is_err());
    }
}
