//! Browser bindings for the demo page in `www/`. Every export returns a JSON
//! string so the page needs no generated type glue.

use mblo::compiler::{compile, factorize_loss, schedule_channel, schedule_to_unitary, MacronodeKind};
use mblo::linalg::{haar_unitary, phase_aligned_distance};
use mblo::resources::{gamma_eff, squeezing_db, sweep_curve, DEFAULT_DELTA_T};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest interferometer the page will compile.
pub const MAX_DEMO_MODES: usize = 12;

pub fn curve_value(n_min: usize, n_max: usize, delta_t: f64) -> mblo::Result<Value> {
    Ok(serde_json::to_value(sweep_curve(n_min, n_max, delta_t)?)?)
}

pub fn compile_value(m: usize, seed: u64) -> mblo::Result<Value> {
    if !(1..=MAX_DEMO_MODES).contains(&m) {
        return Err(mblo::Error::ScaleCap { what: "modes", cap: MAX_DEMO_MODES, got: m });
    }
    let u = haar_unitary(m, &mut ChaCha8Rng::seed_from_u64(seed));
    let schedule = compile(&u, m)?;
    let (residual, _) = phase_aligned_distance(&schedule_to_unitary(&schedule), &u);
    let grid: Vec<Vec<Value>> = schedule
        .grid()
        .iter()
        .map(|row| {
            row.iter()
                .map(|kind| match *kind {
                    MacronodeKind::Identity => json!({"kind": "identity"}),
                    MacronodeKind::Rotation(theta) => json!({"kind": "rotation", "theta": theta}),
                    MacronodeKind::Mz { theta, phi } => json!({"kind": "mz", "theta": theta, "phi": phi}),
                })
                .collect()
        })
        .collect();
    Ok(json!({
        "m": m,
        "k": schedule.k(),
        "grid": grid,
        "residual": residual,
        "mz_count": schedule.count(|k| matches!(k, MacronodeKind::Mz { .. })),
    }))
}

/// Evaluates a random two-mode schedule of depth `k` at squeezing `r` and
/// returns the simulated efficiency next to the closed form for every depth
/// up to `k`.
pub fn channel_value(r: f64, k: usize) -> mblo::Result<Value> {
    if k > 64 {
        return Err(mblo::Error::ScaleCap { what: "depth", cap: 64, got: k });
    }
    let u = haar_unitary(2, &mut ChaCha8Rng::seed_from_u64(k as u64));
    let schedule = compile(&u, k.max(1))?;
    let factor = factorize_loss(&schedule_channel(&schedule, r)?)?;
    let curve: Vec<f64> = (0..=k).map(|d| gamma_eff(r, d)).collect::<mblo::Result<_>>()?;
    Ok(json!({
        "r": r,
        "k": schedule.k(),
        "squeezing_db": squeezing_db(r),
        "gamma_eff_simulated": factor.efficiency,
        "gamma_eff": gamma_eff(r, schedule.k())?,
        "factorization_deviation": factor.deviation,
        "curve": curve,
    }))
}

fn to_js(value: mblo::Result<Value>) -> Result<String, JsError> {
    value.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn squeezing_curve(n_min: usize, n_max: usize) -> Result<String, JsError> {
    to_js(curve_value(n_min, n_max, DEFAULT_DELTA_T))
}

#[wasm_bindgen]
pub fn compile_random(m: usize, seed: u32) -> Result<String, JsError> {
    to_js(compile_value(m, seed as u64))
}

#[wasm_bindgen]
pub fn channel_explorer(r: f64, k: usize) -> Result<String, JsError> {
    to_js(channel_value(r, k))
}
