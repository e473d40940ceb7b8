//! Browser bindings for the interactive demo page: simulate a tessellation
//! of S^2 and tabulate the second-order and typical-segment curves. All
//! entry points take explicit seeds, so the wasm build never needs an
//! entropy source, and results are reproducible across platforms.
//!
//! The `*_impl` functions carry the logic and build plain strings; the
//! exported shims only translate errors into JsValue, so the logic is
//! testable on the host target.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sphere_split::analytics;
use sphere_split::dirdist::DirectionDistribution;
use sphere_split::poissontess;
use sphere_split::quad::QuadratureConfig;
use sphere_split::splitproc;
use sphere_split::sphgeo::{Arc2, UnitVector};
use wasm_bindgen::prelude::*;

const PI: f64 = std::f64::consts::PI;

fn kappa_for(beta: f64) -> Result<DirectionDistribution, String> {
    if beta <= 0.0 {
        Ok(DirectionDistribution::uniform(2))
    } else {
        DirectionDistribution::axial(UnitVector::basis(2, 2), beta).map_err(|e| e.to_string())
    }
}

fn arc_json(arc: &Arc2, birth: f64) -> serde_json::Value {
    serde_json::json!({
        "n": arc.circle.coords(),
        "p0": arc.start.coords(),
        "span": arc.span,
        "birth": birth,
    })
}

fn simulate_tessellation_impl(
    model: &str,
    t: f64,
    seed: u32,
    beta: f64,
) -> Result<String, String> {
    let kappa = kappa_for(beta)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed as u64);
    let value = match model {
        "split" => {
            let y = splitproc::simulate(2, &kappa, t, &mut rng, None, seed as u64)
                .map_err(|e| e.to_string())?;
            let arcs: Vec<serde_json::Value> = y
                .events
                .iter()
                .map(|ev| arc_json(ev.piece.as_arc().expect("d = 2"), ev.time))
                .collect();
            let total_length = y.union_measure().map_err(|e| e.to_string())?;
            serde_json::json!({
                "model": "split",
                "t": t,
                "cells": y.cell_count(),
                "events": y.events.len(),
                "total_length": total_length,
                "expected_length": analytics::expected_surface(2, t),
                "arcs": arcs,
            })
        }
        "poisson" => {
            let p = poissontess::sample(2, &kappa, t, &mut rng, seed as u64)
                .map_err(|e| e.to_string())?;
            let arcs: Vec<serde_json::Value> = p
                .normals
                .iter()
                .map(|s| arc_json(&Arc2::full_circle(s.normal().clone()), 0.0))
                .collect();
            let cells = poissontess::face_counts(p.normals.len() as u64, 2, 2)
                .map_err(|e| e.to_string())?;
            serde_json::json!({
                "model": "poisson",
                "t": t,
                "cells": cells,
                "events": p.normals.len(),
                "total_length": 2.0 * PI * p.normals.len() as f64,
                "expected_length": analytics::expected_surface(2, t),
                "arcs": arcs,
            })
        }
        other => return Err(format!("unknown model {other}")),
    };
    Ok(value.to_string())
}

fn pcf_curves_impl(t: f64, points: usize) -> Result<String, String> {
    let points = points.clamp(16, 2000);
    let mut r_values = Vec::with_capacity(points);
    let mut g_split = Vec::with_capacity(points);
    let mut g_poisson = Vec::with_capacity(points);
    for i in 0..points {
        let r = 0.02 + (PI - 0.04) * i as f64 / (points - 1) as f64;
        r_values.push(r);
        g_split.push(analytics::pcf_split(2, t, r).map_err(|e| e.to_string())?);
        g_poisson.push(analytics::pcf_poisson(2, t, r).map_err(|e| e.to_string())?);
    }
    Ok(serde_json::json!({
        "r": r_values,
        "g_split": g_split,
        "g_poisson": g_poisson,
    })
    .to_string())
}

fn segment_length_curves_impl(t_max: f64, points: usize) -> Result<String, String> {
    let points = points.clamp(16, 2000);
    let mut ts = Vec::with_capacity(points);
    let mut split = Vec::with_capacity(points);
    let mut poisson = Vec::with_capacity(points);
    for i in 0..points {
        let t = t_max * (i + 1) as f64 / points as f64;
        ts.push(t);
        split.push(analytics::mean_segment_length_split(2, t).map_err(|e| e.to_string())?);
        poisson.push(analytics::mean_edge_length_poisson(t));
    }
    Ok(serde_json::json!({"t": ts, "split": split, "poisson": poisson}).to_string())
}

fn birth_density_curve_impl(t: f64, points: usize) -> Result<String, String> {
    let points = points.clamp(16, 2000);
    let mut s_values = Vec::with_capacity(points);
    let mut density = Vec::with_capacity(points);
    for i in 0..points {
        let s = t * (i as f64 + 0.5) / points as f64;
        s_values.push(s);
        density.push(analytics::birth_density(2, t, s).map_err(|e| e.to_string())?);
    }
    Ok(serde_json::json!({"s": s_values, "density": density}).to_string())
}

fn variance_dimension_sweep_impl(d_max: usize) -> Result<String, String> {
    let quad = QuadratureConfig::default();
    let d_max = d_max.clamp(2, 30);
    let mut ds = Vec::new();
    let mut vs = Vec::new();
    for d in 2..=d_max {
        ds.push(d);
        vs.push(analytics::var_surface_isotropic(d, 1.0, &quad).map_err(|e| e.to_string())?);
    }
    Ok(serde_json::json!({"d": ds, "var": vs}).to_string())
}

/// Simulates one tessellation on S^2 and returns its boundary arcs plus
/// summary statistics as JSON. `model` is "split" or "poisson"; `beta` > 0
/// selects the axial-quadratic direction distribution around the z axis.
#[wasm_bindgen]
pub fn simulate_tessellation(
    model: &str,
    t: f64,
    seed: u32,
    beta: f64,
) -> Result<String, JsValue> {
    simulate_tessellation_impl(model, t, seed, beta).map_err(|e| JsValue::from_str(&e))
}

/// Pair-correlation curves of both models at time t on an r grid.
#[wasm_bindgen]
pub fn pcf_curves(t: f64, points: usize) -> Result<String, JsValue> {
    pcf_curves_impl(t, points).map_err(|e| JsValue::from_str(&e))
}

/// Expected typical segment/edge length of both models over (0, t_max].
#[wasm_bindgen]
pub fn segment_length_curves(t_max: f64, points: usize) -> Result<String, JsValue> {
    segment_length_curves_impl(t_max, points).map_err(|e| JsValue::from_str(&e))
}

/// Birth-time density of the typical maximal segment on (0, t).
#[wasm_bindgen]
pub fn birth_density_curve(t: f64, points: usize) -> Result<String, JsValue> {
    birth_density_curve_impl(t, points).map_err(|e| JsValue::from_str(&e))
}

/// Variance of the total boundary length against the dimension at t = 1.
#[wasm_bindgen]
pub fn variance_dimension_sweep(d_max: usize) -> Result<String, JsValue> {
    variance_dimension_sweep_impl(d_max).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simulate_roundtrip() {
        let json = simulate_tessellation_impl("split", 2.0, 7, 0.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["model"], "split");
        assert!(v["arcs"].as_array().unwrap().len() == v["events"].as_u64().unwrap() as usize);
        let json = simulate_tessellation_impl("poisson", 2.0, 7, 1.5).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["model"], "poisson");
        assert!(simulate_tessellation_impl("voronoi", 1.0, 0, 0.0).is_err());
    }

    #[test]
    fn curve_tables() {
        let v: serde_json::Value =
            serde_json::from_str(&pcf_curves_impl(2.0, 64).unwrap()).unwrap();
        assert_eq!(v["r"].as_array().unwrap().len(), 64);
        let v: serde_json::Value =
            serde_json::from_str(&segment_length_curves_impl(8.0, 50).unwrap()).unwrap();
        assert_eq!(v["split"].as_array().unwrap().len(), 50);
        let v: serde_json::Value =
            serde_json::from_str(&birth_density_curve_impl(3.0, 40).unwrap()).unwrap();
        assert_eq!(v["density"].as_array().unwrap().len(), 40);
        let v: serde_json::Value =
            serde_json::from_str(&variance_dimension_sweep_impl(20).unwrap()).unwrap();
        assert_eq!(v["d"].as_array().unwrap().len(), 19);
    }
}
