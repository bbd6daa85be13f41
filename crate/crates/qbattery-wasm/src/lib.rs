//! Browser bindings for the two-qubit battery model. Three interactive
//! operations are exported, each returning a JSON payload the demo page
//! plots directly: the charging curve at one parameter set, the
//! steady-state (theta, zeta1) plane, and the energy-transfer triangle.
//!
//! The functions are ordinary Rust on non-wasm targets, so the host test
//! suite exercises the exact code the browser runs.

use std::f64::consts::PI;

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use qbattery::params::{self, ModelParams};
use qbattery::sweeps::{self, AxisSpec};

#[derive(Serialize)]
struct CurvePayload {
    lt: Vec<f64>,
    delta_e_b: Vec<f64>,
    delta_e_a: Vec<f64>,
    power: Vec<f64>,
    concurrence: Vec<f64>,
    tightness_xz: Vec<f64>,
    tightness_xyz: Vec<f64>,
}

#[derive(Serialize)]
struct PlanePayload {
    theta: Vec<f64>,
    zeta1: Vec<f64>,
    delta_e_b: Vec<f64>,
    concurrence: Vec<f64>,
    tightness_xz: Vec<f64>,
    max_delta_e_b: f64,
    max_at_theta: f64,
    max_at_zeta1: f64,
}

#[derive(Serialize)]
struct TrianglePayload {
    a: Vec<f64>,
    b: Vec<f64>,
    concurrence: Vec<Option<f64>>,
    tightness_xz: Vec<Option<f64>>,
    tightness_xyz: Vec<Option<f64>>,
    transfer_rate: Vec<Option<f64>>,
}

fn model(r: f64, theta_pi: f64, phi_pi: f64, zeta1: f64) -> Result<ModelParams, String> {
    if !(0.0..=1.0).contains(&zeta1) {
        return Err(format!("zeta1 = {zeta1} must lie in [0, 1]"));
    }
    params::validate(ModelParams {
        coupling_ratio: r,
        zeta1,
        zeta2: (1.0 - zeta1 * zeta1).sqrt(),
        theta: theta_pi * PI,
        phi: phi_pi * PI,
        ..ModelParams::default()
    })
    .map_err(|e| e.to_string())
}

/// Observables of one charging run over `lt` in `[0, lt_max]`, JSON-encoded.
#[wasm_bindgen]
pub fn dynamics_curve(
    r: f64,
    theta_pi: f64,
    phi_pi: f64,
    zeta1: f64,
    lt_max: f64,
    points: usize,
) -> Result<String, String> {
    let p = model(r, theta_pi, phi_pi, zeta1)?;
    let r_axis = AxisSpec::new("R", r, r, 1).map_err(|e| e.to_string())?;
    let lt_axis =
        AxisSpec::new("lt", 0.0, lt_max, points.clamp(2, 20_001)).map_err(|e| e.to_string())?;
    let grid = sweeps::sweep_dynamics(&p, &r_axis, &lt_axis, Some(1)).map_err(|e| e.to_string())?;
    let take = |f: fn(&sweeps::SweepRecord) -> Option<f64>| -> Vec<f64> {
        grid.rows.iter().map(|row| f(row).unwrap_or(0.0)).collect()
    };
    let payload = CurvePayload {
        lt: take(|r| r.lt),
        delta_e_b: take(|r| r.delta_e_b),
        delta_e_a: take(|r| r.delta_e_a),
        power: take(|r| r.power),
        concurrence: take(|r| r.concurrence),
        tightness_xz: take(|r| r.tightness_xz),
        tightness_xyz: take(|r| r.tightness_xyz),
    };
    serde_json::to_string(&payload).map_err(|e| e.to_string())
}

/// Steady-state observables over the (theta, zeta1) plane at fixed phase,
/// row-major with theta outer, JSON-encoded.
#[wasm_bindgen]
pub fn steady_plane(phi_pi: f64, theta_points: usize, zeta1_points: usize) -> Result<String, String> {
    let p = params::validate(ModelParams {
        coupling_ratio: 0.7,
        phi: phi_pi * PI,
        ..ModelParams::default()
    })
    .map_err(|e| e.to_string())?;
    let theta_axis = AxisSpec::new("theta", 0.25 * PI, 0.5 * PI, theta_points.clamp(2, 401))
        .map_err(|e| e.to_string())?;
    let zeta_axis =
        AxisSpec::new("zeta1", 0.0, 1.0, zeta1_points.clamp(2, 401)).map_err(|e| e.to_string())?;
    let grid = sweeps::sweep_steady(&p, &theta_axis, &zeta_axis).map_err(|e| e.to_string())?;
    let mut max_delta_e_b = f64::MIN;
    let mut max_at = (0.0, 0.0);
    for row in &grid.rows {
        let v = row.delta_e_b.unwrap_or(f64::MIN);
        if v > max_delta_e_b {
            max_delta_e_b = v;
            max_at = (row.theta.unwrap_or(0.0), row.zeta1.unwrap_or(0.0));
        }
    }
    let payload = PlanePayload {
        theta: theta_axis.values(),
        zeta1: zeta_axis.values(),
        delta_e_b: grid.rows.iter().map(|r| r.delta_e_b.unwrap_or(0.0)).collect(),
        concurrence: grid.rows.iter().map(|r| r.concurrence.unwrap_or(0.0)).collect(),
        tightness_xz: grid.rows.iter().map(|r| r.tightness_xz.unwrap_or(0.0)).collect(),
        max_delta_e_b,
        max_at_theta: max_at.0,
        max_at_zeta1: max_at.1,
    };
    serde_json::to_string(&payload).map_err(|e| e.to_string())
}

/// Observables over the energy-transfer triangle parameterized by the
/// populations `(|eta1|^2, |eta2|^2)`; infeasible points are null.
#[wasm_bindgen]
pub fn transfer_plane(points: usize) -> Result<String, String> {
    let n = points.clamp(2, 401);
    let a_axis = AxisSpec::new("a", 0.0, 1.0, n).map_err(|e| e.to_string())?;
    let b_axis = AxisSpec::new("b", 0.0, 1.0, n).map_err(|e| e.to_string())?;
    let grid = sweeps::sweep_transfer_plane(&a_axis, &b_axis).map_err(|e| e.to_string())?;
    let payload = TrianglePayload {
        a: a_axis.values(),
        b: b_axis.values(),
        concurrence: grid.rows.iter().map(|r| r.concurrence).collect(),
        tightness_xz: grid.rows.iter().map(|r| r.tightness_xz).collect(),
        tightness_xyz: grid.rows.iter().map(|r| r.tightness_xyz).collect(),
        transfer_rate: grid.rows.iter().map(|r| r.transfer_rate).collect(),
    };
    serde_json::to_string(&payload).map_err(|e| e.to_string())
}
