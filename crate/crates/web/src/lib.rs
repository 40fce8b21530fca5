//! Browser bindings: every export takes the text of a `.cfg` file and returns
//! a JSON string for `www/main.js` to draw.

use blowup_core::bounds::{threshold_set, threshold_set_2d, LowerVariant, ThresholdSet, UpperOptions};
use blowup_core::config::{parse_config, ModelConfig};
use blowup_core::dist::{functional_cdf, probability_setup, ProbabilityCase};
use blowup_core::functionals::accumulate;
use blowup_core::ode::{integrate, OdeSettings, OdeSystem};
use blowup_core::spectral::{initial_mass, initial_mass_2d, solve_eigenpair};
use blowup_core::{PathSource, SimGrid};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Plotted series are thinned to at most this many points.
const MAX_POINTS: usize = 1500;

struct Model {
    dims: usize,
    set: ThresholdSet,
    ode: Option<(OdeSystem, [f64; 2])>,
}

fn model(text: &str) -> Result<(Model, SimGrid), String> {
    let cfg = parse_config(text).map_err(|e| e.to_string())?;
    let grid = SimGrid::new(cfg.sim.dt, cfg.sim.horizon).map_err(|e| e.to_string())?;
    let model = cfg.model().map_err(|e| e.to_string())?;
    let spectral = solve_eigenpair(model.domain()).map_err(|e| e.to_string())?;
    let opts = UpperOptions::default();
    let m = match model {
        ModelConfig::OneNoise(p) => {
            let mass = initial_mass(p, &spectral);
            Model {
                dims: 1,
                set: threshold_set(p, &spectral, opts).map_err(|e| e.to_string())?,
                ode: Some((OdeSystem::for_params(p), [mass.h1_0, mass.h2_0])),
            }
        }
        ModelConfig::TwoNoise(p) => {
            let mass = initial_mass_2d(p, &spectral);
            Model {
                dims: 2,
                set: threshold_set_2d(p, &spectral, LowerVariant::default(), opts).map_err(|e| e.to_string())?,
                ode: OdeSystem::damped_2d(p, &spectral).ok().map(|s| (s, [mass.h1_0, mass.h2_0])),
            }
        }
    };
    Ok((m, grid))
}

pub fn thresholds_json(text: &str) -> Result<String, String> {
    let (m, _) = model(text)?;
    let doc = json!({
        "constants": m.set.constants,
        "upper_reason": m.set.upper.as_ref().err().map(|e| e.to_string()),
    });
    Ok(doc.to_string())
}

fn thin(xs: &[f64], stride: usize) -> Vec<f64> {
    xs.iter().step_by(stride).copied().collect()
}

/// One Brownian path with the lower and upper functionals scaled by their
/// thresholds, so both cross at 1.
pub fn path_json(text: &str, seed: u32, path_id: u32) -> Result<String, String> {
    let (m, grid) = model(text)?;
    let path = PathSource::new(seed.into()).path(&grid, m.dims, path_id.into());
    let mut lower = vec![0.0f64; grid.n_nodes()];
    for pair in &m.set.lower.pairs {
        let acc = accumulate(&path, &pair.spec).map_err(|e| e.to_string())?;
        for (l, a) in lower.iter_mut().zip(&acc.values) {
            *l = l.max(a / pair.threshold);
        }
    }
    let lower_hit = m.set.lower.crossing(&path).map_err(|e| e.to_string())?;
    let (upper, upper_hit) = match &m.set.upper {
        Ok(u) => {
            let acc = accumulate(&path, &u.pair.spec).map_err(|e| e.to_string())?;
            let scaled: Vec<f64> = acc.values.iter().map(|a| a / u.pair.threshold).collect();
            let hit = u.crossing(&path).map_err(|e| e.to_string())?;
            (Some(scaled), hit.crossed().then_some(hit.time))
        }
        Err(_) => (None, None),
    };
    let ode_time = match &m.ode {
        Some((sys, init)) => integrate(sys, *init, &path, &OdeSettings::default())
            .ok()
            .and_then(|r| r.blew_up().then_some(r.time)),
        None => None,
    };
    let stride = grid.n_nodes().div_ceil(MAX_POINTS).max(1);
    let t: Vec<f64> = (0..grid.n_nodes()).step_by(stride).map(|k| grid.time(k)).collect();
    let doc = json!({
        "t": t,
        "w": path.values.iter().map(|w| thin(w, stride)).collect::<Vec<_>>(),
        "lower": thin(&lower, stride),
        "upper": upper.map(|u| thin(&u, stride)),
        "tau_lower": lower_hit.crossed().then_some(lower_hit.time),
        "tau_upper": upper_hit,
        "tau_ode": ode_time,
        "horizon": grid.horizon,
    });
    Ok(doc.to_string())
}

/// `P(A ≤ N)` as the threshold `N` varies, with the model's own threshold marked.
pub fn probability_json(text: &str, case: u8) -> Result<String, String> {
    let cfg = parse_config(text).map_err(|e| e.to_string())?;
    let params = cfg.one_noise().map_err(|e| e.to_string())?;
    let spectral = solve_eigenpair(&params.domain).map_err(|e| e.to_string())?;
    let case = ProbabilityCase::from_index(case).map_err(|e| e.to_string())?;
    let setup = probability_setup(params, &spectral, case, UpperOptions::default()).map_err(|e| e.to_string())?;
    let top = 4.0 * setup.threshold;
    let curve: Vec<Value> = (1..=200)
        .map(|i| {
            let n = top * i as f64 / 200.0;
            json!([n, functional_cdf(setup.shape, setup.rho, n).unwrap_or(f64::NAN)])
        })
        .collect();
    let p = functional_cdf(setup.shape, setup.rho, setup.threshold).map_err(|e| e.to_string())?;
    Ok(json!({ "setup": setup, "p_infinite": p, "curve": curve }).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn thresholds(config: &str) -> Result<String, JsError> {
    js(thresholds_json(config))
}

#[wasm_bindgen]
pub fn sample_path(config: &str, seed: u32, path_id: u32) -> Result<String, JsError> {
    js(path_json(config, seed, path_id))
}

#[wasm_bindgen]
pub fn probability_curve(config: &str, case: u8) -> Result<String, JsError> {
    js(probability_json(config, case))
}
