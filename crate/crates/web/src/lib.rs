//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export takes plain numbers and strings and returns a JSON string, so
//! the page needs no generated TypeScript types. The logic lives in ordinary
//! functions so it can be unit-tested on the host.

use phasestep::analysis::{Spacing, STEADY_TOL};
use phasestep::{
    classify, critical_step, simulate, sweep, Axis, ModelParams, OutcomeClass, SchemeId, StepConfig, SweepSpec,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Browsers should not wait on runs longer than this.
const MAX_STEPS: usize = 200_000;
const MAX_CELLS: usize = 40_000;

fn scheme(name: &str) -> Result<SchemeId, String> {
    name.parse().map_err(|e: phasestep::Error| e.to_string())
}

fn params(eps: f64) -> Result<ModelParams, String> {
    let p = ModelParams::new(eps);
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

fn to_json(v: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// JSON has no infinity; unbounded values become `null`.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Serialize)]
struct TrajectoryView {
    class: OutcomeClass,
    limit: Option<f64>,
    first_crossing: Option<usize>,
    h_star: Option<f64>,
    solvability: Option<f64>,
    t: Vec<f64>,
    u: Vec<f64>,
    energy: Vec<f64>,
    error: Option<String>,
}

pub fn trajectory(name: &str, u0: f64, eps: f64, h: f64, max_steps: usize, force: bool) -> Result<String, String> {
    let s = scheme(name)?;
    let p = params(eps)?;
    let report = critical_step(s, u0, &p);
    let mut view = TrajectoryView {
        class: OutcomeClass::Undecided,
        limit: None,
        first_crossing: None,
        h_star: finite(report.h_star),
        solvability: finite(report.solvability),
        t: Vec::new(),
        u: Vec::new(),
        energy: Vec::new(),
        error: None,
    };
    match simulate(s, u0, &p, &StepConfig { h, force_unsafe: force }, max_steps.clamp(1, MAX_STEPS)) {
        Ok(tr) => {
            let o = classify(&tr, STEADY_TOL);
            view.class = o.class;
            view.limit = o.limit;
            view.first_crossing = o.first_crossing;
            view.t = tr.states.iter().map(|st| st.t).collect();
            view.u = tr.states.iter().map(|st| st.u).collect();
            view.energy = tr.energies.iter().map(|e| e.original).collect();
        }
        Err(e) => {
            view.class = phasestep::Outcome::from_error(&e).class;
            view.error = Some(e.to_string());
        }
    }
    to_json(&view)
}

#[derive(Serialize)]
struct Curve {
    scheme: SchemeId,
    h_star: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct CurveView {
    u0: Vec<f64>,
    curves: Vec<Curve>,
}

/// `h*(u0)` for every scheme on `count` points of `[u0_min, u0_max]`.
pub fn threshold_curves(eps: f64, u0_min: f64, u0_max: f64, count: usize) -> Result<String, String> {
    let p = params(eps)?;
    let axis = Axis::linear(u0_min, u0_max, count.clamp(2, 10_000));
    axis.validate().map_err(|e| e.to_string())?;
    let u0 = axis.values();
    let curves = SchemeId::ALL
        .into_iter()
        .map(|s| Curve { scheme: s, h_star: u0.iter().map(|&x| finite(critical_step(s, x, &p).h_star)).collect() })
        .collect();
    to_json(&CurveView { u0, curves })
}

#[derive(Serialize)]
struct GridView {
    u0: Vec<f64>,
    h: Vec<f64>,
    /// Row-major over `u0`, one `OutcomeClass` per cell.
    classes: Vec<OutcomeClass>,
    /// Threshold along the `u0` axis, for overlaying on the map.
    h_star: Vec<Option<f64>>,
}

#[allow(clippy::too_many_arguments)]
pub fn sweep_grid(
    name: &str,
    eps: f64,
    u0_min: f64,
    u0_max: f64,
    n_u0: usize,
    h_min: f64,
    h_max: f64,
    n_h: usize,
    force: bool,
) -> Result<String, String> {
    let s = scheme(name)?;
    let p = params(eps)?;
    if n_u0.saturating_mul(n_h) > MAX_CELLS {
        return Err(format!("grid of {n_u0} x {n_h} cells exceeds {MAX_CELLS}"));
    }
    let h_axis = Axis { min: h_min, max: h_max, count: n_h, spacing: Spacing::Log };
    let mut spec = SweepSpec::new(Axis::linear(u0_min, u0_max, n_u0), h_axis);
    spec.force_unsafe = force;
    let grid = sweep(s, &spec, &p, 20_000).map_err(|e| e.to_string())?;
    let u0 = spec.u0.values();
    let h_star = u0.iter().map(|&x| finite(critical_step(s, x, &p).h_star)).collect();
    to_json(&GridView { u0, h: spec.h.values(), classes: grid.cells.iter().map(|c| c.outcome.class).collect(), h_star })
}

#[wasm_bindgen(js_name = simulateTrajectory)]
pub fn simulate_trajectory(
    scheme: &str,
    u0: f64,
    eps: f64,
    h: f64,
    max_steps: usize,
    force: bool,
) -> Result<String, JsValue> {
    trajectory(scheme, u0, eps, h, max_steps, force).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = thresholdCurves)]
pub fn threshold_curves_js(eps: f64, u0_min: f64, u0_max: f64, count: usize) -> Result<String, JsValue> {
    threshold_curves(eps, u0_min, u0_max, count).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = sweepGrid)]
#[allow(clippy::too_many_arguments)]
pub fn sweep_grid_js(
    scheme: &str,
    eps: f64,
    u0_min: f64,
    u0_max: f64,
    n_u0: usize,
    h_min: f64,
    h_max: f64,
    n_h: usize,
    force: bool,
) -> Result<String, JsValue> {
    sweep_grid(scheme, eps, u0_min, u0_max, n_u0, h_min, h_max, n_h, force).map_err(|e| JsValue::from_str(&e))
}
