//! Browser bindings. Every export returns a JSON string or throws a string error.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use dbs_core::exact_disk::{enumerate_ball_spectrum, Problem};
use dbs_core::experiments::{run_paradox, ParadoxConfig};
use dbs_core::geometry::{regular_polygon, Domain, PolygonMode};
use dbs_core::solver::{
    cluster_multiplicities, compute_spectrum, Method, DEFAULT_CLUSTER_TOL, DEFAULT_NULL_THRESHOLD,
};

/// Upper bounds keeping a single call interactive.
pub const MAX_DEGREE: usize = 24;
pub const MAX_K: usize = 512;
pub const MAX_N: usize = 40;

#[derive(Serialize)]
struct PolygonReport {
    k: usize,
    mode: PolygonMode,
    vertices: Vec<[f64; 2]>,
    values: Vec<f64>,
    multiplicities: Vec<usize>,
    perimeter_over_area: f64,
    disk_dbs: Vec<f64>,
    disk_mdbs: Vec<f64>,
    retained_dim: usize,
    cond_a: f64,
}

#[derive(Serialize)]
struct DiskReport {
    dbs: Vec<f64>,
    mdbs: Vec<f64>,
}

fn check_limits(degree: usize, n_max: usize) -> Result<(), String> {
    if degree > MAX_DEGREE {
        return Err(format!(
            "degree {degree} exceeds the demo limit {MAX_DEGREE}"
        ));
    }
    if n_max == 0 || n_max > MAX_N {
        return Err(format!("n_max must be in 1..={MAX_N}, got {n_max}"));
    }
    Ok(())
}

fn json(value: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Spectrum of one regular k-gon of circumradius or inradius 1, with the disk values for comparison.
pub fn polygon_spectrum_json(
    k: usize,
    mode: &str,
    degree: usize,
    n_max: usize,
) -> Result<String, String> {
    check_limits(degree, n_max)?;
    if k > MAX_K {
        return Err(format!("k {k} exceeds the demo limit {MAX_K}"));
    }
    let mode: PolygonMode = mode.parse().map_err(|e: dbs_core::Error| e.to_string())?;
    let poly = regular_polygon(k, 1.0, mode).map_err(|e| e.to_string())?;
    let vertices = poly.vertices().iter().map(|p| [p.x, p.y]).collect();
    let domain: Domain = poly.into();
    let spectrum = compute_spectrum(
        &domain,
        Method::Poly { degree },
        n_max,
        DEFAULT_NULL_THRESHOLD,
    )
    .map_err(|e| e.to_string())?;
    let multiplicities =
        cluster_multiplicities(&spectrum.values, DEFAULT_CLUSTER_TOL).multiplicities();
    json(&PolygonReport {
        k,
        mode,
        vertices,
        multiplicities,
        perimeter_over_area: domain.constant_quotient(),
        disk_dbs: enumerate_ball_spectrum(n_max, 2, Problem::Dbs).map_err(|e| e.to_string())?,
        disk_mdbs: enumerate_ball_spectrum(n_max, 2, Problem::Mdbs).map_err(|e| e.to_string())?,
        retained_dim: spectrum.retained_dim,
        cond_a: spectrum.cond_a,
        values: spectrum.values,
    })
}

/// Convergence table for a comma-separated list of side counts.
pub fn paradox_json(
    k_list: &str,
    mode: &str,
    degree: usize,
    n_max: usize,
) -> Result<String, String> {
    check_limits(degree, n_max)?;
    let ks = k_list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad k `{}`: {e}", s.trim()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if ks.iter().any(|&k| k > MAX_K) {
        return Err(format!("every k must be <= {MAX_K}"));
    }
    let mode: PolygonMode = mode.parse().map_err(|e: dbs_core::Error| e.to_string())?;
    let table =
        run_paradox(&ParadoxConfig::new(ks, mode, degree, n_max)).map_err(|e| e.to_string())?;
    Ok(table.to_json())
}

/// First `count` DBS and MDBS eigenvalues of the unit disk.
pub fn disk_spectra_json(count: usize) -> Result<String, String> {
    if count > 1000 {
        return Err(format!("count must be <= 1000, got {count}"));
    }
    json(&DiskReport {
        dbs: enumerate_ball_spectrum(count, 2, Problem::Dbs).map_err(|e| e.to_string())?,
        mdbs: enumerate_ball_spectrum(count, 2, Problem::Mdbs).map_err(|e| e.to_string())?,
    })
}

#[wasm_bindgen]
pub fn polygon_spectrum(
    k: usize,
    mode: &str,
    degree: usize,
    n_max: usize,
) -> Result<String, JsValue> {
    polygon_spectrum_json(k, mode, degree, n_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn paradox(k_list: &str, mode: &str, degree: usize, n_max: usize) -> Result<String, JsValue> {
    paradox_json(k_list, mode, degree, n_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn disk_spectra(count: usize) -> Result<String, JsValue> {
    disk_spectra_json(count).map_err(|e| JsValue::from_str(&e))
}
