//! WebAssembly bindings for the browser demo.
//!
//! Each export takes plain numbers and returns a JSON string. The pure-Rust
//! functions behind them are public so they can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use pathspin::chsh::{chsh_value, optimize_settings, OptimizerOptions, SettingsAngles, SpinSearch};
use pathspin::experiment::{violation_fraction, DetectorModel, ImprecisionSpec, Source};
use pathspin::lhv::LhvModel;
use pathspin::preparation::{prepare_state, PreparationConfig};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Evaluation {
    pub e11: f64,
    pub e12: f64,
    pub e21: f64,
    pub e22: f64,
    pub s: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CurvePoint {
    pub a: f64,
    pub s_max: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ScanPoint {
    pub epsilon: f64,
    pub qm_fraction: f64,
    pub lhv_fraction: f64,
}

/// Exact correlations and `S` for the state `(a, δ)` at the given x–z plane
/// settings (all angles in radians).
pub fn evaluate(
    a: f64,
    delta: f64,
    theta1: f64,
    theta2: f64,
    b1_polar: f64,
    b2_polar: f64,
) -> pathspin::Result<Evaluation> {
    let state = prepare_state(PreparationConfig::from_transmission(a, delta)?)?;
    let angles = SettingsAngles {
        theta1,
        theta2,
        b1_polar,
        b2_polar,
        ..SettingsAngles::optimal()
    };
    let r = chsh_value(&state, &angles.to_settings()?)?;
    Ok(Evaluation {
        e11: r.e11,
        e12: r.e12,
        e21: r.e21,
        e22: r.e22,
        s: r.s,
        violated: r.violated,
    })
}

/// Optimized `|S|` at `points` evenly spaced values of `a` in `[0, 1]`.
pub fn entanglement_curve(delta: f64, points: usize, full_sphere: bool) -> pathspin::Result<Vec<CurvePoint>> {
    if points < 2 {
        return Err(pathspin::Error::InvalidParameter {
            field: "points",
            reason: format!("need at least 2, got {points}"),
        });
    }
    let opts = OptimizerOptions {
        spin_search: if full_sphere {
            SpinSearch::FullSphere
        } else {
            SpinSearch::XzPlane
        },
        ..OptimizerOptions::default()
    };
    (0..points)
        .map(|k| {
            let a = k as f64 / (points - 1) as f64;
            let state = prepare_state(PreparationConfig::from_transmission(a, delta)?)?;
            Ok(CurvePoint {
                a,
                s_max: optimize_settings(&state, &opts)?.s_max,
            })
        })
        .collect()
}

/// Violation fractions for the maximally entangled state and a uniform
/// hidden-variable model at `steps` misalignment levels in `[0, eps_max]`.
pub fn violation_scan(
    eps_max: f64,
    steps: usize,
    shots: u64,
    trials: u64,
    seed: u64,
) -> pathspin::Result<Vec<ScanPoint>> {
    if steps < 2 || eps_max.is_nan() || eps_max <= 0.0 {
        return Err(pathspin::Error::InvalidParameter {
            field: "steps",
            reason: format!("need at least 2 steps over a positive range, got {steps} up to {eps_max}"),
        });
    }
    let nominal = SettingsAngles::optimal();
    let qm = Source::Quantum(pathspin::preparation::maximally_entangled());
    let lhv = Source::Lhv(LhvModel::uniform());
    (0..steps)
        .map(|k| {
            let epsilon = eps_max * k as f64 / (steps - 1) as f64;
            let spec = ImprecisionSpec {
                epsilon,
                shots_per_setting: shots,
                trials,
                sigma_threshold: 5.0,
                detector: DetectorModel::ideal(),
            };
            Ok(ScanPoint {
                epsilon,
                qm_fraction: violation_fraction(&qm, &nominal, &spec, seed)?,
                lhv_fraction: violation_fraction(&lhv, &nominal, &spec, seed)?,
            })
        })
        .collect()
}

fn to_js<T: Serialize>(result: pathspin::Result<T>) -> Result<String, JsError> {
    let value = result.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = evaluate)]
pub fn evaluate_js(
    a: f64,
    delta: f64,
    theta1: f64,
    theta2: f64,
    b1_polar: f64,
    b2_polar: f64,
) -> Result<String, JsError> {
    to_js(evaluate(a, delta, theta1, theta2, b1_polar, b2_polar))
}

#[wasm_bindgen(js_name = entanglementCurve)]
pub fn entanglement_curve_js(delta: f64, points: usize, full_sphere: bool) -> Result<String, JsError> {
    to_js(entanglement_curve(delta, points, full_sphere))
}

#[wasm_bindgen(js_name = violationScan)]
pub fn violation_scan_js(
    eps_max: f64,
    steps: usize,
    shots: u32,
    trials: u32,
    seed: u32,
) -> Result<String, JsError> {
    to_js(violation_scan(eps_max, steps, shots.into(), trials.into(), seed.into()))
}
