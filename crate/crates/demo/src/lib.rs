//! WebAssembly bindings for the static page in `www/`.
//!
//! The exported functions are thin wrappers over [`compute`], which holds the
//! plain Rust logic so that it can be tested natively.

use wasm_bindgen::prelude::*;

pub mod compute {
    use impact_core::model::{
        cumulative_rate, peak_age, per_follower_rate, ModelParams, DEFAULT_REL_TOL,
    };
    use impact_core::pipeline::{follower_histories, LogIndex, Stratum};
    use impact_core::{simulate_population, SimConfig};

    pub const SMOOTH_WIDTH: usize = 5;

    /// Model curves sampled at `n` evenly spaced ages in `(0, t_max]`.
    #[derive(Debug, Clone, PartialEq)]
    pub struct Curves {
        pub t: Vec<f64>,
        pub cumulative: Vec<f64>,
        pub per_follower: Vec<f64>,
    }

    pub fn curves(params: &ModelParams, t_max: f64, n: usize) -> Result<Curves, String> {
        if !(t_max.is_finite() && t_max > 0.0) || n == 0 {
            return Err(format!("need t_max > 0 and n >= 1, got {t_max} and {n}"));
        }
        let t: Vec<f64> = (1..=n).map(|k| t_max * k as f64 / n as f64).collect();
        let cumulative = t
            .iter()
            .map(|&x| cumulative_rate(params, x))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let per_follower = t
            .iter()
            .map(|&x| per_follower_rate(params, x))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        Ok(Curves {
            t,
            cumulative,
            per_follower,
        })
    }

    /// `[t_star, g_at_peak]`.
    pub fn peak(params: &ModelParams) -> Result<[f64; 2], String> {
        let p = peak_age(params, DEFAULT_REL_TOL).map_err(|e| e.to_string())?;
        Ok([p.t_star, p.g_at_peak])
    }

    /// Smoothed median career curve of a simulated population whose careers
    /// all span `horizon` weeks, optionally divided by follower counts.
    pub fn simulated_curve(
        params: ModelParams,
        n_users: u32,
        horizon: u32,
        seed: u64,
        normalize: bool,
    ) -> Result<Vec<f64>, String> {
        if horizon < 2 {
            return Err("horizon must be at least 2 weeks".into());
        }
        let config = SimConfig::new(params, 1.0, 1, horizon, n_users, seed);
        let log = simulate_population(&config).map_err(|e| e.to_string())?;
        let index = LogIndex::new(&log);
        let histories = follower_histories(&log);
        let stratum = Stratum::new(horizon - 1, horizon).map_err(|e| e.to_string())?;
        let (curve, _) = index.career_curve(&stratum, normalize.then_some(&histories));
        let curve = curve.smoothed(SMOOTH_WIDTH).map_err(|e| e.to_string())?;
        Ok(curve.values)
    }

    pub fn params(c: f64, alpha: f64, epsilon: f64, s: f64) -> Result<ModelParams, String> {
        ModelParams::new(c, alpha, epsilon, s).map_err(|e| e.to_string())
    }
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen]
pub struct ModelCurves {
    inner: compute::Curves,
}

#[wasm_bindgen]
impl ModelCurves {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.inner.t.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn cumulative(&self) -> Vec<f64> {
        self.inner.cumulative.clone()
    }

    #[wasm_bindgen(getter, js_name = perFollower)]
    pub fn per_follower(&self) -> Vec<f64> {
        self.inner.per_follower.clone()
    }
}

#[wasm_bindgen(js_name = modelCurves)]
pub fn model_curves(
    c: f64,
    alpha: f64,
    epsilon: f64,
    s: f64,
    t_max: f64,
    n: usize,
) -> Result<ModelCurves, JsError> {
    let params = compute::params(c, alpha, epsilon, s).map_err(js)?;
    let inner = compute::curves(&params, t_max, n).map_err(js)?;
    Ok(ModelCurves { inner })
}

#[wasm_bindgen(js_name = peakAge)]
pub fn peak_age(c: f64, alpha: f64, epsilon: f64, s: f64) -> Result<Vec<f64>, JsError> {
    let params = compute::params(c, alpha, epsilon, s).map_err(js)?;
    Ok(compute::peak(&params).map_err(js)?.to_vec())
}

#[wasm_bindgen(js_name = simulatedCurve)]
pub fn simulated_curve(
    c: f64,
    alpha: f64,
    s: f64,
    n_users: u32,
    horizon: u32,
    seed: u64,
    normalize: bool,
) -> Result<Vec<f64>, JsError> {
    let params = compute::params(c, alpha, 1.0, s).map_err(js)?;
    compute::simulated_curve(params, n_users, horizon, seed, normalize).map_err(js)
}
