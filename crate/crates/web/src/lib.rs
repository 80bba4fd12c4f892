//! Browser bindings for three views of `gegenkrr`: the spectrum of a
//! Gegenbauer kernel matrix against its Marchenko-Pastur limit, the
//! asymptotic bias and variance curves, and the multiple-descent staircase.
//!
//! Each view is a plain Rust function returning flat arrays, wrapped by a
//! `#[wasm_bindgen]` export that the static page in `www/` calls.

use std::collections::BTreeMap;

use gegenkrr::asymptotics::{log_grid, risk_curves, staircase_curve, MpLaw, RiskInputs, StaircaseSpec};
use gegenkrr::domains::sample_dataset;
use gegenkrr::spectrum::{gegenbauer_spectrum, samples_for_ratio};
use gegenkrr::Domain;
use wasm_bindgen::prelude::*;

/// Largest cube dimension the page offers; `B_2 = 231` keeps one eigensolve
/// well under a second.
pub const MAX_DEMO_D: usize = 22;

#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumView {
    eigenvalues: Vec<f64>,
    grid: Vec<f64>,
    density: Vec<f64>,
    atom: f64,
    ks: f64,
    n: usize,
}

#[wasm_bindgen]
impl SpectrumView {
    #[wasm_bindgen(getter)]
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn grid(&self) -> Vec<f64> {
        self.grid.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn density(&self) -> Vec<f64> {
        self.density.clone()
    }
    /// Point mass of the limit law at zero.
    #[wasm_bindgen(getter)]
    pub fn atom(&self) -> f64 {
        self.atom
    }
    #[wasm_bindgen(getter)]
    pub fn ks(&self) -> f64 {
        self.ks
    }
    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.n
    }
}

/// Eigenvalues of `Q_2` on `n = psi B_2` uniform points of the `d`-cube and
/// the limiting density sampled on `points` abscissas.
pub fn spectrum_view(d: usize, psi: f64, seed: u64, points: usize) -> Result<SpectrumView, String> {
    if !(2..=MAX_DEMO_D).contains(&d) {
        return Err(format!("d must be in 2..={MAX_DEMO_D}"));
    }
    let domain = Domain::hypercube(d).map_err(|e| e.to_string())?;
    let n = samples_for_ratio(domain, 2, psi).map_err(|e| e.to_string())?;
    let rep = gegenbauer_spectrum(&sample_dataset(domain, n, seed), 2).map_err(|e| e.to_string())?;
    let law = MpLaw::new(rep.psi_hat).map_err(|e| e.to_string())?;
    let hi = law.lambda_plus * 1.05;
    let grid: Vec<f64> = (0..points).map(|i| hi * (i as f64 + 0.5) / points as f64).collect();
    let density = grid.iter().map(|&x| law.density(x)).collect();
    Ok(SpectrumView { eigenvalues: rep.eigenvalues, grid, density, atom: law.atom, ks: rep.ks_distance, n })
}

#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Curves {
    x: Vec<f64>,
    bias: Vec<f64>,
    variance: Vec<f64>,
    total: Vec<f64>,
}

#[wasm_bindgen]
impl Curves {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn bias(&self) -> Vec<f64> {
        self.bias.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn variance(&self) -> Vec<f64> {
        self.variance.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn total(&self) -> Vec<f64> {
        self.total.clone()
    }
}

/// Bias, variance and test error over a log grid of `psi`, for unit level
/// energy, noise `sigma_sq` and no tail.
pub fn risk_view(zeta: f64, sigma_sq: f64, psi_min: f64, psi_max: f64, points: usize) -> Result<Curves, String> {
    if !(psi_min > 0.0 && psi_max > psi_min && points >= 2) {
        return Err("need 0 < psi_min < psi_max and at least two points".into());
    }
    let x = log_grid(psi_min, psi_max, points);
    let mut out = Curves { x: x.clone(), bias: Vec::new(), variance: Vec::new(), total: Vec::new() };
    for psi in x {
        let r = risk_curves(RiskInputs { psi, zeta_star: zeta, f_ell_sq: 1.0, f_tail_sq: 0.0, sigma_sq, lambda: 0.0, mu_ell: 1.0 })
            .map_err(|e| e.to_string())?;
        out.bias.push(r.bias);
        out.variance.push(sigma_sq * r.variance);
        out.total.push(r.r_test);
    }
    Ok(out)
}

/// Staircase `R_test(kappa)` for `n = d^kappa` with energies `F_1^2..F_3^2`
/// and one effective regularization per level. Only `total` is filled.
pub fn staircase_view(d: f64, energies: [f64; 3], zetas: [f64; 3], sigma_sq: f64, points: usize) -> Result<Curves, String> {
    if !(d > 1.0) || points < 2 {
        return Err("need d > 1 and at least two points".into());
    }
    let spec = StaircaseSpec {
        energies: (1..=3).zip(energies).collect::<BTreeMap<_, _>>(),
        sigma_sq,
        zetas: (1..=3).zip(zetas).collect::<BTreeMap<_, _>>(),
        window: 0.45,
        log_scale: d.ln(),
    };
    let kappas: Vec<f64> = (0..points).map(|i| 0.5 + 3.0 * i as f64 / (points - 1) as f64).collect();
    let curve = staircase_curve(&spec, &kappas).map_err(|e| e.to_string())?;
    Ok(Curves { x: kappas, bias: Vec::new(), variance: Vec::new(), total: curve.iter().map(|p| p.r_test).collect() })
}

#[wasm_bindgen(js_name = spectrum)]
pub fn spectrum_js(d: usize, psi: f64, seed: u64) -> Result<SpectrumView, JsError> {
    spectrum_view(d, psi, seed, 200).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = riskCurves)]
pub fn risk_curves_js(zeta: f64, sigma_sq: f64) -> Result<Curves, JsError> {
    risk_view(zeta, sigma_sq, 0.05, 20.0, 200).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = staircase)]
pub fn staircase_js(d: f64, f1: f64, f2: f64, f3: f64, zeta: f64, sigma_sq: f64) -> Result<Curves, JsError> {
    staircase_view(d, [f1, f2, f3], [zeta; 3], sigma_sq, 601).map_err(|e| JsError::new(&e))
}
