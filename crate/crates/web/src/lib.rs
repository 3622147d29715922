//! WebAssembly bindings behind the static page in `www/`.
//!
//! Atom-cavity couplings and detunings stay at their defaults; the page
//! varies the classical drives, the cavity decay rate and the time window.
//! Each JS export is a thin wrapper over a plain Rust function so the
//! numerics can be tested natively.

use wasm_bindgen::prelude::*;

use twomode::analytic::analytic_point;
use twomode::fock::{construct_analytic_state, FockDims};
use twomode::moments::{integrate_moments, observables_from_moments, MomentVector, DEFAULT_PSI};
use twomode::{SystemParams, TimeGrid, ValidatedParams};

/// Largest integration step used for lossy curves.
const MAX_MOMENT_DT: f64 = 0.01;
const MAX_POINTS: usize = 20_000;
const MAX_TRUNCATION: usize = 60;

/// Sampled `N(t)` and `D(t)`.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Curves {
    t: Vec<f64>,
    photons: Vec<f64>,
    duan: Vec<f64>,
}

#[wasm_bindgen]
impl Curves {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }

    /// Total photon number.
    #[wasm_bindgen(getter)]
    pub fn photons(&self) -> Vec<f64> {
        self.photons.clone()
    }

    /// Duan sum; values below 2 certify entanglement.
    #[wasm_bindgen(getter)]
    pub fn duan(&self) -> Vec<f64> {
        self.duan.clone()
    }
}

impl Curves {
    fn with_capacity(n: usize) -> Self {
        Self {
            t: Vec::with_capacity(n),
            photons: Vec::with_capacity(n),
            duan: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, n: f64, d: f64) {
        self.t.push(t);
        self.photons.push(n);
        self.duan.push(d);
    }
}

fn params(omega1: f64, omega2: f64, kappa: f64) -> Result<ValidatedParams, String> {
    SystemParams::default()
        .with_drives(omega1, omega2)
        .with_kappa(kappa)
        .validate()
        .map_err(|e| e.to_string())
}

fn spacing(t_max: f64, points: usize) -> Result<f64, String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be between 2 and {MAX_POINTS}"));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err("t_max must be positive".into());
    }
    Ok(t_max / (points - 1) as f64)
}

/// Lossless closed-form curves on `points` evenly spaced times in `[0, t_max]`.
pub fn closed_form_curves(omega1: f64, omega2: f64, t_max: f64, points: usize) -> Result<Curves, String> {
    let h = spacing(t_max, points)?;
    let p = params(omega1, omega2, 0.0)?;
    let c = p.couplings();
    let mut out = Curves::with_capacity(points);
    for k in 0..points {
        let t = k as f64 * h;
        let pt = analytic_point(&p, &c, t).map_err(|e| e.to_string())?;
        out.push(t, pt.n_total, pt.duan);
    }
    Ok(out)
}

/// Lossy curves from the moment engine, integrated with a step of at most
/// 0.01 that divides the output spacing.
pub fn lossy_curves(
    kappa: f64,
    omega1: f64,
    omega2: f64,
    t_max: f64,
    points: usize,
) -> Result<Curves, String> {
    let h = spacing(t_max, points)?;
    let p = params(omega1, omega2, kappa)?;
    let substeps = (h / MAX_MOMENT_DT).ceil().max(1.0);
    let dt = h / substeps;
    let grid = TimeGrid::new(t_max, dt)
        .and_then(|g| g.with_stride(substeps as usize))
        .map_err(|e| e.to_string())?;
    let traj = integrate_moments(&p, MomentVector::vacuum(), &grid).map_err(|e| e.to_string())?;
    let mut out = Curves::with_capacity(points);
    for (&t, m) in traj.times.iter().zip(&traj.moments) {
        let (n, d) = observables_from_moments(m, DEFAULT_PSI);
        out.push(t, n, d);
    }
    Ok(out)
}

/// Joint photon-number distribution `P(n1, n2)` of the lossless state at
/// time `t`, row-major `trunc x trunc`.
pub fn joint_photon_distribution(omega1: f64, omega2: f64, t: f64, trunc: usize) -> Result<Vec<f64>, String> {
    if !(3..=MAX_TRUNCATION).contains(&trunc) {
        return Err(format!("truncation must be between 3 and {MAX_TRUNCATION}"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err("t must be nonnegative".into());
    }
    let p = params(omega1, omega2, 0.0)?;
    let s = analytic_point(&p, &p.couplings(), t)
        .map_err(|e| e.to_string())?
        .state;
    let dims = FockDims::field(trunc, trunc).map_err(|e| e.to_string())?;
    let psi = construct_analytic_state(s.alpha1, s.alpha2, s.a_plus(), dims).map_err(|e| e.to_string())?;
    Ok(psi.photon_distribution())
}

#[wasm_bindgen(js_name = closedFormCurves)]
pub fn closed_form_curves_js(omega1: f64, omega2: f64, t_max: f64, points: usize) -> Result<Curves, JsError> {
    closed_form_curves(omega1, omega2, t_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = lossyCurves)]
pub fn lossy_curves_js(
    kappa: f64,
    omega1: f64,
    omega2: f64,
    t_max: f64,
    points: usize,
) -> Result<Curves, JsError> {
    lossy_curves(kappa, omega1, omega2, t_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = jointPhotonDistribution)]
pub fn joint_photon_distribution_js(
    omega1: f64,
    omega2: f64,
    t: f64,
    trunc: usize,
) -> Result<Vec<f64>, JsError> {
    joint_photon_distribution(omega1, omega2, t, trunc).map_err(|e| JsError::new(&e))
}
