//! Ridge regression on independent Gaussian features whose block variances
//! are the kernel eigenvalues, the linear model that KRR is asymptotically
//! equivalent to.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::domains::{subspace_dim, Domain};
use crate::error::{Error, Result};
use crate::kernels::CoefficientProfile;
use crate::krr::{exact_risk_profile, map_cells, mean_with_error, run_trial, cell_index, theory_point, SweepConfig};
use crate::linalg::spd_solve;
use crate::seed::{derive_seed, rng_from_seed, stream};

/// Largest feature count a design may have.
pub const MAX_FEATURES: u128 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailHandling {
    /// Degrees above `K` add `mu_{>K}` to the ridge and their energy to the noise.
    FoldIntoRidge,
    /// Degrees above `K` become `p_tail` extra coordinates of variance `mu_{>K} / p_tail`.
    ExplicitBlock { p_tail: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBlock {
    /// `None` for the explicit tail block.
    pub degree: Option<usize>,
    pub size: usize,
    pub variance: f64,
    /// Degree 0 is the deterministic coordinate `sqrt(mu_0)`.
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianDesign {
    pub blocks: Vec<GaussianBlock>,
    pub theta_star: Vec<f64>,
    pub tail: TailHandling,
    /// `mu_{>K}`
    pub tail_mass: f64,
    /// `F_{>K}^2`
    pub tail_energy: f64,
}

impl GaussianDesign {
    /// Design for degrees `0..=k_max` of a profile, with `theta_star` drawn so
    /// that block `k` carries energy `F_k^2` in expectation: coefficients
    /// `beta ~ N(0, F_k^2 / B_k)` mapped to `theta = sqrt(B_k / mu_k) beta`.
    pub fn new(
        profile: &CoefficientProfile,
        k_max: usize,
        energies: &BTreeMap<usize, f64>,
        tail: TailHandling,
        seed: u64,
    ) -> Result<Self> {
        if k_max > profile.max_degree() {
            return Err(Error::DegreeOutOfRange { degree: k_max, max: profile.max_degree() });
        }
        let domain = profile.domain;
        let mut rng = rng_from_seed(seed);
        let mut blocks = Vec::new();
        let mut theta_star = Vec::new();
        let mut total: u128 = 0;
        for k in 0..=k_max {
            let b = subspace_dim(domain, k)?;
            total += b;
            if total > MAX_FEATURES {
                return Err(Error::Unsupported(format!("design would need more than {MAX_FEATURES} features")));
            }
            let mu = profile.mu[k];
            if mu < 0.0 {
                return Err(Error::InvalidParameter { name: "profile", reason: format!("negative mass at degree {k}") });
            }
            let f2 = energies.get(&k).copied().unwrap_or(0.0);
            if f2 > 0.0 && mu == 0.0 {
                return Err(Error::DegenerateLevel { ell: k, mu });
            }
            let size = b as usize;
            blocks.push(GaussianBlock { degree: Some(k), size, variance: mu / b as f64, constant: k == 0 });
            let sd = if f2 > 0.0 { (f2 / b as f64).sqrt() * (b as f64 / mu).sqrt() } else { 0.0 };
            theta_star.extend((0..size).map(|_| sd * rng.sample::<f64, _>(StandardNormal)));
        }
        let tail_mass = profile.tail(k_max).max(0.0);
        let tail_energy: f64 = energies.range(k_max + 1..).map(|(_, v)| v).sum();
        if let TailHandling::ExplicitBlock { p_tail } = tail {
            if p_tail == 0 {
                return Err(Error::InvalidParameter { name: "p_tail", reason: "must be positive".into() });
            }
            if tail_energy > 0.0 && tail_mass == 0.0 {
                return Err(Error::DegenerateLevel { ell: k_max + 1, mu: 0.0 });
            }
            blocks.push(GaussianBlock { degree: None, size: p_tail, variance: tail_mass / p_tail as f64, constant: false });
            let sd = if tail_energy > 0.0 { (tail_energy / tail_mass).sqrt() } else { 0.0 };
            theta_star.extend((0..p_tail).map(|_| sd * rng.sample::<f64, _>(StandardNormal)));
        }
        Ok(Self { blocks, theta_star, tail, tail_mass, tail_energy })
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// Per-coordinate second moments.
    pub fn variances(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.variance, b.size))
            .collect()
    }

    /// `sum_j E z_j^2` plus the folded tail mass; equals `h(1)`.
    pub fn total_second_moment(&self) -> f64 {
        let explicit: f64 = self.blocks.iter().map(|b| b.variance * b.size as f64).sum();
        match self.tail {
            TailHandling::FoldIntoRidge => explicit + self.tail_mass,
            TailHandling::ExplicitBlock { .. } => explicit,
        }
    }

    /// Ridge actually used: `lambda + mu_{>K}` when the tail is folded.
    pub fn effective_lambda(&self, lambda: f64) -> f64 {
        match self.tail {
            TailHandling::FoldIntoRidge => lambda + self.tail_mass,
            TailHandling::ExplicitBlock { .. } => lambda,
        }
    }

    /// Target energy not represented by any coordinate.
    pub fn folded_energy(&self) -> f64 {
        match self.tail {
            TailHandling::FoldIntoRidge => self.tail_energy,
            TailHandling::ExplicitBlock { .. } => 0.0,
        }
    }
}

/// `n` i.i.d. feature rows.
pub fn sample_design_features(design: &GaussianDesign, n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng_from_seed(seed);
    let p = design.dim();
    let mut z = DMatrix::zeros(n, p);
    for i in 0..n {
        let mut j = 0;
        for b in &design.blocks {
            let sd = b.variance.sqrt();
            for _ in 0..b.size {
                z[(i, j)] = if b.constant { sd } else { sd * rng.sample::<f64, _>(StandardNormal) };
                j += 1;
            }
        }
    }
    z
}

/// Responses `<z_i, theta_star> + eps_i`, the noise carrying the folded tail energy.
pub fn gauss_responses(design: &GaussianDesign, z: &DMatrix<f64>, sigma_sq: f64, seed: u64) -> Vec<f64> {
    let theta = DVector::from_column_slice(&design.theta_star);
    let mut y = z * theta;
    let sd = (sigma_sq + design.folded_energy()).sqrt();
    if sd > 0.0 {
        let mut rng = rng_from_seed(seed);
        for v in y.iter_mut() {
            *v += sd * rng.sample::<f64, _>(StandardNormal);
        }
    }
    y.as_slice().to_vec()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussFit {
    pub theta_hat: DVector<f64>,
    /// `||(Z Z^T + lambda I) w - y|| / ||y||`
    pub residual: f64,
}

/// `theta_hat = Z^T (Z Z^T + lambda I)^{-1} y`.
pub fn ridge_fit_gauss(z: &DMatrix<f64>, y: &[f64], lambda: f64) -> Result<GaussFit> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter { name: "lambda", reason: format!("must be nonnegative, got {lambda}") });
    }
    if y.len() != z.nrows() {
        return Err(Error::DimensionMismatch(format!("{} responses for {} rows", y.len(), z.nrows())));
    }
    let g = z * z.transpose();
    let (w, residual) = spd_solve(&g, lambda, &DVector::from_column_slice(y))?;
    if !(residual <= crate::krr::MAX_SOLVE_RESIDUAL) {
        return Err(Error::SolverFailure(format!("relative residual {residual:e}")));
    }
    Ok(GaussFit { theta_hat: z.transpose() * w, residual })
}

/// `(theta_star - theta_hat)^T Sigma (theta_star - theta_hat)` plus the
/// folded tail energy.
pub fn gauss_risk(theta_hat: &DVector<f64>, design: &GaussianDesign) -> Result<f64> {
    if theta_hat.len() != design.dim() {
        return Err(Error::DimensionMismatch(format!("theta has {} entries, design {}", theta_hat.len(), design.dim())));
    }
    let mut r = 0.0;
    let mut j = 0;
    for b in &design.blocks {
        let mut s = 0.0;
        for _ in 0..b.size {
            let e = design.theta_star[j] - theta_hat[j];
            s += e * e;
            j += 1;
        }
        r += b.variance * s;
    }
    Ok(r + design.folded_energy())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConfig {
    pub sweep: SweepConfig,
    /// Largest explicit degree; defaults to `ell + 1`.
    pub k_max: usize,
    pub tail: TailHandling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub n: usize,
    pub psi_hat: f64,
    pub krr_mean: f64,
    pub krr_se: f64,
    pub gauss_mean: f64,
    pub gauss_se: f64,
    pub theory: f64,
}

/// Test risk of one Gaussian-model trial.
pub fn gauss_trial(cfg: &EquivalenceConfig, profile: &CoefficientProfile, n: usize, cell: u64) -> Result<f64> {
    let s = &cfg.sweep;
    let design = GaussianDesign::new(profile, cfg.k_max, &s.energies, cfg.tail, derive_seed(s.seed, stream::GAUSS_TARGET, cell))?;
    let z = sample_design_features(&design, n, derive_seed(s.seed, stream::GAUSS_DESIGN, cell));
    let y = gauss_responses(&design, &z, s.sigma_sq, derive_seed(s.seed, stream::GAUSS_NOISE, cell));
    let fit = ridge_fit_gauss(&z, &y, design.effective_lambda(s.lambda))?;
    gauss_risk(&fit.theta_hat, &design)
}

/// Paired KRR and Gaussian-model risks over the same grid and trial count.
pub fn equivalence_report(cfg: &EquivalenceConfig) -> Result<Vec<EquivalenceRow>> {
    let s = &cfg.sweep;
    if s.trials == 0 {
        return Err(Error::InvalidParameter { name: "trials", reason: "must be at least 1".into() });
    }
    let profile = exact_risk_profile(&s.kernel, s.domain)?;
    let b = subspace_dim(s.domain, s.ell)? as f64;
    let cells = s.n_grid.len() * s.trials;
    let results = map_cells(2 * cells, |c| {
        let (side, c) = (c / cells, c % cells);
        let (g, t) = (c / s.trials, c % s.trials);
        let n = s.n_grid[g];
        if side == 0 {
            run_trial(s, &profile, n, cell_index(g, t)).map(|o| o.test)
        } else {
            gauss_trial(cfg, &profile, n, cell_index(g, t))
        }
    });
    let results: Vec<f64> = results.into_iter().collect::<Result<_>>()?;
    let (krr, gauss) = results.split_at(cells);
    s.n_grid
        .iter()
        .enumerate()
        .map(|(g, &n)| {
            let range = g * s.trials..(g + 1) * s.trials;
            let k = mean_with_error(&krr[range.clone()]);
            let q = mean_with_error(&gauss[range]);
            let psi = n as f64 / b;
            let th = theory_point(&profile, s.ell, s.lambda, &s.energies, s.sigma_sq, psi)?;
            Ok(EquivalenceRow {
                n,
                psi_hat: psi,
                krr_mean: k.estimate,
                krr_se: k.std_error,
                gauss_mean: q.estimate,
                gauss_se: q.std_error,
                theory: th.r_test,
            })
        })
        .collect()
}

/// Default explicit degree for a level.
pub fn default_k_max(domain: Domain, ell: usize) -> usize {
    match domain.kind {
        crate::domains::DomainKind::Hypercube => (ell + 1).min(domain.d),
        crate::domains::DomainKind::Sphere => ell + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{compute_profile, KernelSpec};

    fn profile(d: usize) -> CoefficientProfile {
        compute_profile(&KernelSpec::exponential(), Domain::hypercube(d).unwrap(), d, 0).unwrap()
    }

    #[test]
    fn second_moments_add_to_h1() {
        let p = profile(10);
        for tail in [TailHandling::FoldIntoRidge, TailHandling::ExplicitBlock { p_tail: 30 }] {
            let des = GaussianDesign::new(&p, 3, &BTreeMap::from([(2, 1.0)]), tail, 0).unwrap();
            assert!((des.total_second_moment() - std::f64::consts::E).abs() < 1e-8);
        }
    }

    #[test]
    fn identity_design_halves_response() {
        let z = DMatrix::identity(4, 4);
        let fit = ridge_fit_gauss(&z, &[1.0, 2.0, 3.0, 4.0], 1.0).unwrap();
        for (i, v) in fit.theta_hat.iter().enumerate() {
            assert!((v - (i + 1) as f64 / 2.0).abs() < 1e-14);
        }
        let big = ridge_fit_gauss(&z, &[1.0, 2.0, 3.0, 4.0], 1e14).unwrap();
        assert!(big.theta_hat.amax() < 1e-13);
    }

    #[test]
    fn interpolation_at_floor() {
        let p = profile(8);
        let des = GaussianDesign::new(&p, 3, &BTreeMap::from([(2, 1.0)]), TailHandling::ExplicitBlock { p_tail: 5 }, 1).unwrap();
        let z = sample_design_features(&des, 20, 2);
        let y: Vec<f64> = (0..20).map(|i| (i as f64).cos()).collect();
        let fit = ridge_fit_gauss(&z, &y, 1e-8).unwrap();
        let pred = &z * &fit.theta_hat;
        for (a, b) in pred.iter().zip(&y) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn risk_endpoints() {
        let p = profile(8);
        let energies = BTreeMap::from([(1, 0.5), (2, 1.0), (5, 0.25)]);
        let des = GaussianDesign::new(&p, 3, &energies, TailHandling::FoldIntoRidge, 3).unwrap();
        let exact = DVector::from_column_slice(&des.theta_star);
        assert_eq!(gauss_risk(&exact, &des).unwrap(), 0.25);
        let zero = DVector::zeros(des.dim());
        let r0 = gauss_risk(&zero, &des).unwrap();
        // realized energies of the drawn theta plus the folded part
        let realized: f64 = des.variances().iter().zip(&des.theta_star).map(|(v, t)| v * t * t).sum();
        assert!((r0 - realized - 0.25).abs() < 1e-12);
    }

    #[test]
    fn constant_block_and_zero_blocks() {
        let p = CoefficientProfile {
            domain: Domain::hypercube(4).unwrap(),
            xi: vec![2.0, 0.0, 0.25],
            mu: vec![2.0, 0.0, 1.5],
            h1: 3.5,
            non_psd_degrees: vec![],
        };
        let des = GaussianDesign::new(&p, 2, &BTreeMap::new(), TailHandling::FoldIntoRidge, 0).unwrap();
        let z = sample_design_features(&des, 6, 1);
        assert!(z.column(0).iter().all(|v| *v == 2f64.sqrt()));
        assert!(z.columns(1, 4).iter().all(|v| *v == 0.0));
        assert_eq!(z, sample_design_features(&des, 6, 1));
    }
}
