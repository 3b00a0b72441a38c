//! Browser bindings. Each export takes a JSON request and returns a JSON response,
//! so the page needs no generated types.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;
use zeta_core::eigen::first_eigenvalue;
use zeta_core::energy::geometric_grid;
use zeta_core::models::PsiKind;
use zeta_core::{make_model, mountain_pass_with_profile, scan_profile, Error, FunctionalModel, ModelSpec};

#[derive(Debug, Deserialize)]
pub struct Request {
    pub model: ModelSpec,
    #[serde(default = "default_r_min")]
    pub r_min: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_r_min() -> f64 {
    1e-2
}

fn default_r_max() -> f64 {
    1e2
}

fn default_samples() -> usize {
    24
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Point {
    pub r: f64,
    pub phi: f64,
    pub zeta: f64,
    pub dzeta: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProfileResponse {
    pub samples: Vec<Point>,
    /// Radius where the maximizer failed, if the scan stopped early.
    pub failed_at: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SolveResponse {
    pub r_star: f64,
    pub c_star: f64,
    pub residual_dual: f64,
    pub rho: f64,
    pub big_r: f64,
    pub profile: Vec<Point>,
    pub corners: Vec<[f64; 2]>,
    /// Node coordinates (first axis) and nodal values of the solution.
    pub nodes: Vec<f64>,
    pub solution: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EigenResponse {
    pub lambda1: f64,
    pub residual: f64,
    pub iterations: usize,
    pub nodes: Vec<f64>,
    pub e1: Vec<f64>,
}

fn parse(request: &str) -> Result<(Request, FunctionalModel), String> {
    let req: Request = serde_json::from_str(request).map_err(|e| format!("bad request: {e}"))?;
    if !(req.r_min > 0.0 && req.r_max > req.r_min) || req.samples < 2 {
        return Err("need 0 < r_min < r_max and at least 2 samples".into());
    }
    let model = make_model(&req.model).map_err(|e| e.to_string())?;
    Ok((req, model))
}

fn points(profile: &zeta_core::EnergyProfile) -> Vec<Point> {
    profile
        .samples
        .iter()
        .map(|s| Point {
            r: s.r,
            phi: s.phi,
            zeta: s.zeta,
            dzeta: s.dzeta,
        })
        .collect()
}

fn first_coordinates(model: &FunctionalModel) -> Vec<f64> {
    let g = model.grid();
    (0..g.len()).map(|k| g.node(k)[0]).collect()
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// `zeta` and `zeta'` on a log-spaced grid of radii.
pub fn profile_json(request: &str) -> Result<String, String> {
    let (req, model) = parse(request)?;
    let radii = geometric_grid(req.r_min, req.r_max, req.samples);
    let response = match scan_profile(&model, &radii, &Default::default()) {
        Ok(p) => ProfileResponse {
            samples: points(&p),
            failed_at: None,
        },
        Err(Error::ScanFailed { r, partial, .. }) => ProfileResponse {
            samples: points(&partial),
            failed_at: Some(r),
        },
        Err(e) => return Err(e.to_string()),
    };
    to_json(&response)
}

/// Mountain-pass search with default options; the scan range of the request is not used.
pub fn solve_json(request: &str) -> Result<String, String> {
    let (_, model) = parse(request)?;
    let (rep, profile) =
        mountain_pass_with_profile(&model, &Default::default(), &Default::default(), &Default::default())
            .map_err(|e| e.to_string())?;
    let w = rep.witness.as_ref().ok_or("no mountain-pass witnesses")?;
    to_json(&SolveResponse {
        r_star: rep.r_star,
        c_star: rep.c_star,
        residual_dual: rep.residual_dual,
        rho: w.rho,
        big_r: w.big_r,
        profile: points(&profile),
        corners: rep.corners.iter().map(|c| [c.r, c.zeta]).collect(),
        nodes: first_coordinates(&model),
        solution: rep.solution.into_inner(),
    })
}

/// First eigenpair of the model's quadratic form (with its potential on radial grids).
pub fn eigen_json(request: &str) -> Result<String, String> {
    let (_, model) = parse(request)?;
    let g = model.grid();
    let potential = match model.psi_kind() {
        PsiKind::SchrodingerRadial { potential, .. } => Some(potential.as_slice()),
        _ => None,
    };
    let e = first_eigenvalue(g, &vec![1.0; g.len()], potential).map_err(|e| e.to_string())?;
    to_json(&EigenResponse {
        lambda1: e.lambda1,
        residual: e.residual,
        iterations: e.iterations,
        nodes: first_coordinates(&model),
        e1: e.e1.into_inner(),
    })
}

#[wasm_bindgen]
pub fn energy_profile(request: &str) -> Result<String, JsValue> {
    profile_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn mountain_pass(request: &str) -> Result<String, JsValue> {
    solve_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn first_eigenpair(request: &str) -> Result<String, JsValue> {
    eigen_json(request).map_err(|e| JsValue::from_str(&e))
}
