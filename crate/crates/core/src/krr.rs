//! Targets, kernel ridge regression fits, and their test/train errors.
//!
//! The exact test error expands both the target and the fitted function in
//! the Gegenbauer eigenspaces. With `u_k = (P_k f)(X)` and dual coefficients
//! `a`, the degree-`k` part of the risk is
//!
//! ```text
//! ||P_k f||^2 - 2 xi_k a^T u_k + xi_k^2 B_k a^T Q_k(X X^T) a
//! ```
//!
//! which needs no test points at all.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{risk_curves, AsymptoticRisk, RiskInputs};
use crate::domains::{binomial, gram, sample_dataset, subsets_of_size, subspace_dim, Dataset, Domain, DomainKind};
use crate::error::{Error, Result};
use crate::gegenbauer::{krawtchouk, GegenbauerEvaluator};
use crate::kernels::{compute_profile, effective_regularization, kernel_matrix, CoefficientProfile, KernelSpec, DEFAULT_QUADRATURE_ORDER};
use crate::linalg::{spd_inverse, spd_solve, DoubleDouble};
use crate::seed::{derive_seed, rng_from_seed, stream};

/// `lambda = 0+` is realized as this multiple of `h(1)`.
pub const LAMBDA_FLOOR_REL: f64 = 1e-8;

/// Profile cutoff used for exact sphere risks.
pub const SPHERE_EXACT_CUTOFF: usize = 30;

/// Largest number of Fourier coefficients drawn for one degree.
pub const MAX_FOURIER_TERMS: u128 = 5_000_000;

/// Solve residual above which a fit is rejected. Well-conditioned systems
/// land near machine precision; this only catches broken factorizations.
pub const MAX_SOLVE_RESIDUAL: f64 = 1e-6;

pub fn lambda_floor(kernel: &KernelSpec) -> f64 {
    LAMBDA_FLOOR_REL * kernel.h_at_one().abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureBlock {
    pub centers: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TargetTerms {
    /// `f(x) = sum_S beta_S prod_{i in S} x_i`, grouped by `|S|`.
    HypercubeFourier { coefficients: BTreeMap<usize, Vec<(u64, f64)>> },
    /// `f(x) = sum_k sum_j c_kj Q_k(<w_kj, x>)`.
    GegenbauerFeatures { blocks: BTreeMap<usize, FeatureBlock> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetFunction {
    pub domain: Domain,
    pub terms: TargetTerms,
    pub sigma_eps: f64,
    /// Exact `||P_k f||^2` for every degree carrying energy.
    pub energies: BTreeMap<usize, f64>,
}

impl TargetFunction {
    pub fn total_energy(&self) -> f64 {
        self.energies.values().sum()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().last().copied().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<usize> {
        match &self.terms {
            TargetTerms::HypercubeFourier { coefficients } => coefficients.keys().copied().collect(),
            TargetTerms::GegenbauerFeatures { blocks } => blocks.keys().copied().collect(),
        }
    }

    /// `alpha f` with the same noise level.
    pub fn scaled(&self, alpha: f64) -> Self {
        let terms = match &self.terms {
            TargetTerms::HypercubeFourier { coefficients } => TargetTerms::HypercubeFourier {
                coefficients: coefficients
                    .iter()
                    .map(|(k, v)| (*k, v.iter().map(|(s, b)| (*s, alpha * b)).collect()))
                    .collect(),
            },
            TargetTerms::GegenbauerFeatures { blocks } => TargetTerms::GegenbauerFeatures {
                blocks: blocks
                    .iter()
                    .map(|(k, b)| {
                        (*k, FeatureBlock { centers: b.centers.clone(), weights: b.weights.iter().map(|w| alpha * w).collect() })
                    })
                    .collect(),
            },
        };
        Self {
            domain: self.domain,
            terms,
            sigma_eps: self.sigma_eps,
            energies: self.energies.iter().map(|(k, e)| (*k, alpha * alpha * e)).collect(),
        }
    }

    /// `(P_k f)(x_i)` for every row of the dataset.
    pub fn degree_values(&self, k: usize, dataset: &Dataset) -> Result<Vec<f64>> {
        if dataset.domain != self.domain {
            return Err(Error::DimensionMismatch("target and points live on different domains".into()));
        }
        let n = dataset.n();
        match &self.terms {
            TargetTerms::HypercubeFourier { coefficients } => {
                let Some(terms) = coefficients.get(&k) else { return Ok(vec![0.0; n]) };
                let masks = dataset.sign_masks()?;
                Ok(masks
                    .iter()
                    .map(|m| {
                        terms
                            .iter()
                            .map(|(s, b)| if (m & s).count_ones() % 2 == 0 { *b } else { -*b })
                            .sum()
                    })
                    .collect())
            }
            TargetTerms::GegenbauerFeatures { blocks } => {
                let Some(block) = blocks.get(&k) else { return Ok(vec![0.0; n]) };
                let ev = GegenbauerEvaluator::new(self.domain, k)?;
                let d = self.domain.d as f64;
                let mut buf = vec![0.0; k + 1];
                let mut out = vec![0.0; n];
                for (i, o) in out.iter_mut().enumerate() {
                    let x = dataset.points.row(i);
                    for (w, c) in block.centers.iter().zip(&block.weights) {
                        let t: f64 = w.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                        ev.eval_into(t.clamp(-d, d), &mut buf);
                        *o += c * buf[k];
                    }
                }
                Ok(out)
            }
        }
    }
}

/// `f_*` evaluated at every row of the dataset.
pub fn evaluate_target(target: &TargetFunction, dataset: &Dataset) -> Result<Vec<f64>> {
    let mut out = vec![0.0; dataset.n()];
    for k in target.degrees() {
        for (o, v) in out.iter_mut().zip(target.degree_values(k, dataset)?) {
            *o += v;
        }
    }
    Ok(out)
}

/// Gram matrix `(Q_k(<w_i, w_j>))` of feature centers.
pub fn feature_gram(domain: Domain, k: usize, centers: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let ev = GegenbauerEvaluator::new(domain, k)?;
    let d = domain.d as f64;
    let m = centers.len();
    let mut g = DMatrix::zeros(m, m);
    let mut buf = vec![0.0; k + 1];
    for i in 0..m {
        g[(i, i)] = 1.0;
        for j in (i + 1)..m {
            let t: f64 = centers[i].iter().zip(&centers[j]).map(|(a, b)| a * b).sum();
            ev.eval_into(t.clamp(-d, d), &mut buf);
            g[(i, j)] = buf[k];
            g[(j, i)] = buf[k];
        }
    }
    Ok(g)
}

/// `c^T G_k c / B_k`.
pub fn feature_energy(domain: Domain, k: usize, block: &FeatureBlock) -> Result<f64> {
    let g = feature_gram(domain, k, &block.centers)?;
    let c = DVector::from_column_slice(&block.weights);
    Ok((c.transpose() * g * &c)[(0, 0)] / subspace_dim(domain, k)? as f64)
}

/// Draws a target with random per-degree energies `f_sq` plus fixed
/// hypercube coefficients `beta_star` (subset mask, value).
///
/// Hypercube coefficients are i.i.d. `N(0, F_k^2 / B_k)`, so the realized
/// energy fluctuates around `F_k^2`. Sphere targets use `4 B_k` random
/// feature centers with Gaussian weights rescaled to energy exactly `F_k^2`.
pub fn draw_target(
    domain: Domain,
    f_sq: &BTreeMap<usize, f64>,
    beta_star: &[(u64, f64)],
    sigma_eps: f64,
    seed: u64,
) -> Result<TargetFunction> {
    if let Some((k, v)) = f_sq.iter().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::InvalidParameter { name: "F", reason: format!("energy at degree {k} must be nonnegative, got {v}") });
    }
    if !(sigma_eps >= 0.0) {
        return Err(Error::InvalidParameter { name: "sigma", reason: format!("must be nonnegative, got {sigma_eps}") });
    }
    let mut rng = rng_from_seed(seed);
    let d = domain.d;
    match domain.kind {
        DomainKind::Hypercube => {
            let mut coefficients: BTreeMap<usize, BTreeMap<u64, f64>> = BTreeMap::new();
            for (&k, &f2) in f_sq {
                if k > d {
                    return Err(Error::DegreeOutOfRange { degree: k, max: d });
                }
                if f2 == 0.0 {
                    continue;
                }
                let b = binomial(d as u64, k as u64);
                if b > MAX_FOURIER_TERMS {
                    return Err(Error::Unsupported(format!("degree {k} has {b} Fourier coefficients")));
                }
                let sd = (f2 / b as f64).sqrt();
                let entry = coefficients.entry(k).or_default();
                for s in subsets_of_size(d, k) {
                    entry.insert(s, sd * rng.sample::<f64, _>(StandardNormal));
                }
            }
            for &(s, v) in beta_star {
                if d < 64 && s >> d != 0 {
                    return Err(Error::InvalidParameter { name: "beta_star", reason: format!("subset {s:#x} exceeds d = {d}") });
                }
                let k = s.count_ones() as usize;
                *coefficients.entry(k).or_default().entry(s).or_insert(0.0) += v;
            }
            let mut energies = BTreeMap::new();
            let coefficients: BTreeMap<usize, Vec<(u64, f64)>> = coefficients
                .into_iter()
                .filter_map(|(k, m)| {
                    let e: f64 = m.values().map(|b| b * b).sum();
                    if e == 0.0 {
                        return None;
                    }
                    energies.insert(k, e);
                    Some((k, m.into_iter().collect()))
                })
                .collect();
            Ok(TargetFunction { domain, terms: TargetTerms::HypercubeFourier { coefficients }, sigma_eps, energies })
        }
        DomainKind::Sphere => {
            if !beta_star.is_empty() {
                return Err(Error::Unsupported("fixed coefficients need the hypercube Fourier basis".into()));
            }
            let mut blocks = BTreeMap::new();
            let mut energies = BTreeMap::new();
            for (&k, &f2) in f_sq {
                if f2 == 0.0 {
                    continue;
                }
                let m = 4 * subspace_dim(domain, k)? as usize;
                let mut centers = Vec::with_capacity(m);
                let mut buf = vec![0.0; d];
                for _ in 0..m {
                    crate::domains::fill_sphere_point(&mut rng, &mut buf);
                    centers.push(buf.clone());
                }
                let weights: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let mut block = FeatureBlock { centers, weights };
                let e = feature_energy(domain, k, &block)?;
                let scale = (f2 / e).sqrt();
                block.weights.iter_mut().for_each(|w| *w *= scale);
                energies.insert(k, feature_energy(domain, k, &block)?);
                blocks.insert(k, block);
            }
            Ok(TargetFunction { domain, terms: TargetTerms::GegenbauerFeatures { blocks }, sigma_eps, energies })
        }
    }
}

/// Responses `y_i = f(x_i) + eps_i` with Gaussian noise.
pub fn noisy_responses(target: &TargetFunction, dataset: &Dataset, seed: u64) -> Result<Vec<f64>> {
    let mut y = evaluate_target(target, dataset)?;
    if target.sigma_eps > 0.0 {
        let mut rng = rng_from_seed(seed);
        for v in &mut y {
            *v += target.sigma_eps * rng.sample::<f64, _>(StandardNormal);
        }
    }
    Ok(y)
}

#[derive(Debug, Clone)]
pub struct KrrFit {
    pub dataset: Dataset,
    pub kernel: KernelSpec,
    pub lambda: f64,
    pub y: DVector<f64>,
    pub a: DVector<f64>,
    /// `||(H + lambda I) a - y|| / ||y||`
    pub residual: f64,
    pub h: DMatrix<f64>,
}

/// `a = (H + lambda I)^{-1} y`.
pub fn fit_krr(dataset: &Dataset, kernel: &KernelSpec, lambda: f64, y: &[f64]) -> Result<KrrFit> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter { name: "lambda", reason: format!("must be nonnegative, got {lambda}") });
    }
    if y.len() != dataset.n() {
        return Err(Error::DimensionMismatch(format!("{} responses for {} points", y.len(), dataset.n())));
    }
    let h = kernel_matrix(kernel, dataset);
    let yv = DVector::from_column_slice(y);
    let (a, residual) = spd_solve(&h, lambda, &yv)?;
    if !(residual <= MAX_SOLVE_RESIDUAL) {
        return Err(Error::SolverFailure(format!("relative residual {residual:e} with lambda = {lambda:e}")));
    }
    Ok(KrrFit { dataset: dataset.clone(), kernel: kernel.clone(), lambda, y: yv, a, residual, h })
}

impl KrrFit {
    pub fn n(&self) -> usize {
        self.dataset.n()
    }

    /// `lambda^2 ||a||^2 / n`.
    pub fn train_error(&self) -> f64 {
        self.lambda * self.lambda * self.a.norm_squared() / self.n() as f64
    }

    /// `||y - H a||^2 / n`, computed directly.
    pub fn train_error_direct(&self) -> f64 {
        (&self.y - &self.h * &self.a).norm_squared() / self.n() as f64
    }

    /// `a^T H a`. On the hypercube it is summed as `sum_k mu_k a^T Q_k a`
    /// over exact level forms, since `H a` itself is only accurate to
    /// `eps ||H|| ||a||` and `||a||` is huge near the ridge floor.
    pub fn rkhs_norm(&self) -> f64 {
        let domain = self.dataset.domain;
        if !domain.is_hypercube() {
            return self.a.dot(&(&self.h * &self.a));
        }
        let profile = compute_profile(&self.kernel, domain, domain.d, 0).expect("hypercube profile up to degree d");
        let factor = DMatrix::from_column_slice(self.n(), 1, self.a.as_slice());
        let (forms, _) = level_forms(&self.dataset, &factor, domain.d).expect("factor matches the dataset");
        profile.mu.iter().zip(&forms).map(|(m, f)| m * f).sum()
    }

    /// `f_hat(x) = sum_i a_i h(<x_i, x> / d)` at every row of `points`.
    pub fn predict(&self, points: &Dataset) -> Result<Vec<f64>> {
        if points.domain != self.dataset.domain {
            return Err(Error::DimensionMismatch("prediction points on a different domain".into()));
        }
        let d = self.dataset.d();
        let a = self.a.as_slice();
        if self.dataset.domain.is_hypercube() {
            let table: Vec<f64> = (0..=d).map(|j| self.kernel.h((d as f64 - 2.0 * j as f64) / d as f64)).collect();
            let train = self.dataset.sign_masks()?;
            let test = points.sign_masks()?;
            Ok(test
                .iter()
                .map(|m| train.iter().zip(a).map(|(t, ai)| ai * table[(m ^ t).count_ones() as usize]).sum())
                .collect())
        } else {
            let cross = &points.points * self.dataset.points.transpose();
            Ok((0..points.n())
                .map(|i| {
                    (0..self.n())
                        .map(|j| a[j] * self.kernel.h((cross[(i, j)] / d as f64).clamp(-1.0, 1.0)))
                        .sum()
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Mean and jackknife standard error (for a mean this is `s / sqrt(N)`).
pub fn mean_with_error(values: &[f64]) -> McEstimate {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        f64::NAN
    };
    McEstimate { estimate: mean, std_error: (var / n).sqrt() }
}

/// `E_x (f(x) - f_hat(x))^2` over `n_test` fresh uniform points.
pub fn test_error_mc(fit: &KrrFit, target: &TargetFunction, n_test: usize, seed: u64) -> Result<McEstimate> {
    if n_test < 100 {
        return Err(Error::InvalidParameter { name: "n_test", reason: format!("need at least 100, got {n_test}") });
    }
    const CHUNK: usize = 4096;
    let mut sq = Vec::with_capacity(n_test);
    let mut done = 0;
    let mut chunk_index = 0;
    while done < n_test {
        let m = CHUNK.min(n_test - done);
        let pts = sample_dataset(fit.dataset.domain, m, derive_seed(seed, stream::TEST_POINTS, chunk_index));
        let f = evaluate_target(target, &pts)?;
        let p = fit.predict(&pts)?;
        sq.extend(f.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)));
        done += m;
        chunk_index += 1;
    }
    Ok(mean_with_error(&sq))
}

/// `sum_{i,j} W_ij Q_k(<x_i, x_j>)` for `k <= max_k` and `W = C C^T`, plus
/// `sum |W_ij|`.
///
/// The factor `C` is passed instead of `W` because near the ridge floor the
/// entries of `W` reach `1e16` while the forms are `O(1)`: every product is
/// accumulated exactly in double-double, and on the hypercube the Hamming
/// classes are combined with the integer Krawtchouk values before the single
/// division by `C(d, k)`.
pub fn level_forms(dataset: &Dataset, factor: &DMatrix<f64>, max_k: usize) -> Result<(Vec<f64>, f64)> {
    let n = dataset.n();
    if factor.nrows() != n {
        return Err(Error::DimensionMismatch(format!("factor has {} rows for {n} points", factor.nrows())));
    }
    let rows = factor.transpose();
    let entry = |i: usize, j: usize| {
        let mut w = DoubleDouble::default();
        for (x, y) in rows.column(i).iter().zip(rows.column(j).iter()) {
            w.add_product(*x, *y);
        }
        w
    };
    let mut abs_sum = 0.0;
    let mut forms = vec![DoubleDouble::default(); max_k + 1];
    if dataset.domain.is_hypercube() {
        let d = dataset.d();
        if max_k > d {
            return Err(Error::DegreeOutOfRange { degree: max_k, max: d });
        }
        let masks = dataset.sign_masks()?;
        let mut classes = vec![DoubleDouble::default(); d + 1];
        for i in 0..n {
            let w = entry(i, i);
            abs_sum += w.value().abs();
            classes[0].add_scaled(w, 1.0);
            for j in (i + 1)..n {
                let w = entry(i, j);
                abs_sum += 2.0 * w.value().abs();
                classes[(masks[i] ^ masks[j]).count_ones() as usize].add_scaled(w, 2.0);
            }
        }
        for (k, f) in forms.iter_mut().enumerate() {
            for (j, c) in classes.iter().enumerate() {
                // K_k(j) split into two doubles so that d > 53 stays exact
                let kk = krawtchouk(d, k, j);
                let hi = kk as f64;
                let lo = (kk - hi as i128) as f64;
                f.add_scaled(*c, hi);
                f.add_scaled(*c, lo);
            }
            let b = binomial(d as u64, k as u64) as f64;
            *f = DoubleDouble { hi: f.hi / b, lo: f.lo / b };
        }
    } else {
        let ev = GegenbauerEvaluator::new(dataset.domain, max_k)?;
        let g = gram(dataset);
        let d = dataset.d() as f64;
        let mut buf = vec![0.0; max_k + 1];
        for i in 0..n {
            let w = entry(i, i);
            abs_sum += w.value().abs();
            for f in forms.iter_mut() {
                f.add_scaled(w, 1.0);
            }
            for j in (i + 1)..n {
                let w = entry(i, j);
                if w.hi == 0.0 {
                    continue;
                }
                abs_sum += 2.0 * w.value().abs();
                ev.eval_into(g[(i, j)].clamp(-d, d), &mut buf);
                for (f, q) in forms.iter_mut().zip(&buf) {
                    f.add_scaled(w, 2.0 * q);
                }
            }
        }
    }
    Ok((forms.iter().map(DoubleDouble::value).collect(), abs_sum))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeRisk {
    pub degree: usize,
    pub target_energy: f64,
    /// `xi_k a^T u_k`
    pub cross: f64,
    /// `||P_k f_hat||^2`
    pub fitted_energy: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRisk {
    pub total: f64,
    pub per_degree: Vec<DegreeRisk>,
    /// Upper bound on the omitted degrees above `k_tail` (zero on the hypercube).
    pub tail_bound: f64,
    pub k_tail: usize,
}

/// Profile with enough degrees for exact risks on a domain.
pub fn exact_risk_profile(kernel: &KernelSpec, domain: Domain) -> Result<CoefficientProfile> {
    let k = match domain.kind {
        DomainKind::Hypercube => domain.d,
        DomainKind::Sphere => SPHERE_EXACT_CUTOFF,
    };
    compute_profile(kernel, domain, k, DEFAULT_QUADRATURE_ORDER)
}

/// Bound on `sum_{k > K} xi_k^2 B_k |W . Q_k|`, using `|Q_k| <= 1` and
/// `xi_k <= mu_{>K} / B_{K+1}` for `k > K`.
fn sphere_tail_bound(profile: &CoefficientProfile, abs_sum: f64) -> Result<f64> {
    let k = profile.max_degree();
    let tail = profile.tail(k).max(0.0);
    let b_next = subspace_dim(profile.domain, k + 1)? as f64;
    Ok(tail * tail / b_next * abs_sum)
}

fn check_profile(profile: &CoefficientProfile, dataset: &Dataset, target: &TargetFunction) -> Result<()> {
    if profile.domain != dataset.domain || target.domain != dataset.domain {
        return Err(Error::DimensionMismatch("profile, target and data must share a domain".into()));
    }
    if profile.domain.is_hypercube() && profile.max_degree() != profile.domain.d {
        return Err(Error::InvalidParameter { name: "profile", reason: "hypercube exact risk needs all d + 1 degrees".into() });
    }
    if target.max_degree() > profile.max_degree() {
        return Err(Error::DegreeOutOfRange { degree: target.max_degree(), max: profile.max_degree() });
    }
    Ok(())
}

fn degree_risks(
    profile: &CoefficientProfile,
    target: &TargetFunction,
    dataset: &Dataset,
    a: &DVector<f64>,
) -> Result<(Vec<DegreeRisk>, f64)> {
    let kmax = profile.max_degree();
    let (forms, abs_sum) = level_forms(dataset, &DMatrix::from_column_slice(a.len(), 1, a.as_slice()), kmax)?;
    let mut rows = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let e = target.energies.get(&k).copied().unwrap_or(0.0);
        let cross = if e > 0.0 {
            let u = target.degree_values(k, dataset)?;
            let mut dot = DoubleDouble::default();
            for (x, y) in u.iter().zip(a.iter()) {
                dot.add_product(*x, *y);
            }
            profile.xi[k] * dot.value()
        } else {
            0.0
        };
        let b = subspace_dim(profile.domain, k)? as f64;
        let fitted = profile.xi[k] * profile.xi[k] * b * forms[k];
        rows.push(DegreeRisk { degree: k, target_energy: e, cross, fitted_energy: fitted, contribution: e - 2.0 * cross + fitted });
    }
    let bound = if profile.domain.is_hypercube() { 0.0 } else { sphere_tail_bound(profile, abs_sum)? };
    Ok((rows, bound))
}

fn tail_tolerance(risk: f64) -> f64 {
    1e-10 * risk.max(1e-6)
}

/// Exact `E_x (f(x) - f_hat(x))^2` by eigenspace decomposition.
pub fn test_error_exact(fit: &KrrFit, target: &TargetFunction, profile: &CoefficientProfile) -> Result<ExactRisk> {
    check_profile(profile, &fit.dataset, target)?;
    let (per_degree, tail_bound) = degree_risks(profile, target, &fit.dataset, &fit.a)?;
    let total: f64 = per_degree.iter().map(|r| r.contribution).sum();
    if tail_bound > tail_tolerance(total) {
        return Err(Error::TailBoundExceeded { bound: tail_bound, tolerance: tail_tolerance(total) });
    }
    Ok(ExactRisk { total, per_degree, tail_bound, k_tail: profile.max_degree() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeBiasVariance {
    pub degree: usize,
    pub bias: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasVarianceSplit {
    pub per_degree: Vec<DegreeBiasVariance>,
    pub tail_bound: f64,
}

impl BiasVarianceSplit {
    pub fn total(&self) -> f64 {
        self.per_degree.iter().map(|r| r.bias + r.variance).sum()
    }
}

/// Per-degree `E_eps` of the exact risk split into the noiseless fit (bias)
/// and `sigma^2 xi_k^2 B_k Tr(Xi Q_k Xi)` (variance), `Xi = (H + lambda I)^{-1}`.
pub fn bias_variance_split(
    dataset: &Dataset,
    kernel: &KernelSpec,
    lambda: f64,
    target: &TargetFunction,
    profile: &CoefficientProfile,
) -> Result<BiasVarianceSplit> {
    check_profile(profile, dataset, target)?;
    let h = kernel_matrix(kernel, dataset);
    let xi_mat = spd_inverse(&h, lambda)?;
    let f = DVector::from_vec(evaluate_target(target, dataset)?);
    let a_f = &xi_mat * f;
    let (bias_rows, bias_bound) = degree_risks(profile, target, dataset, &a_f)?;
    let sigma_sq = target.sigma_eps * target.sigma_eps;
    let (var_forms, var_bound) = if sigma_sq > 0.0 {
        // Xi is symmetric, so Xi^2 = Xi Xi^T
        let (forms, abs_sum) = level_forms(dataset, &xi_mat, profile.max_degree())?;
        let bound = if profile.domain.is_hypercube() { 0.0 } else { sphere_tail_bound(profile, abs_sum)? * sigma_sq };
        (forms, bound)
    } else {
        (vec![0.0; profile.max_degree() + 1], 0.0)
    };
    let mut per_degree = Vec::with_capacity(bias_rows.len());
    for r in &bias_rows {
        let k = r.degree;
        let b = subspace_dim(profile.domain, k)? as f64;
        per_degree.push(DegreeBiasVariance {
            degree: k,
            bias: r.contribution,
            variance: sigma_sq * profile.xi[k] * profile.xi[k] * b * var_forms[k],
        });
    }
    let split = BiasVarianceSplit { per_degree, tail_bound: bias_bound + var_bound };
    let total = split.total();
    if split.tail_bound > tail_tolerance(total) {
        return Err(Error::TailBoundExceeded { bound: split.tail_bound, tolerance: tail_tolerance(total) });
    }
    Ok(split)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskMethod {
    Exact,
    MonteCarlo { n_test: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub domain: Domain,
    pub kernel: KernelSpec,
    pub ell: usize,
    pub lambda: f64,
    /// `F_k^2` per degree.
    pub energies: BTreeMap<usize, f64>,
    pub sigma_sq: f64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub risk: RiskMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub psi_hat: f64,
    pub test_mean: f64,
    pub test_se: f64,
    pub train_mean: f64,
    pub train_se: f64,
    pub rkhs_mean: f64,
    pub rkhs_se: f64,
    pub theory_test: f64,
    pub theory_train: f64,
    pub theory_rkhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub test: f64,
    /// `lambda^2 ||a||^2 / n`
    pub train: f64,
    /// `a^T H a / n`
    pub rkhs_per_n: f64,
}

/// Sample sizes `round(psi B_l)` for each `psi`.
pub fn n_grid_from_psi(domain: Domain, ell: usize, psis: &[f64]) -> Result<Vec<usize>> {
    let b = subspace_dim(domain, ell)? as f64;
    Ok(psis.iter().map(|p| ((p * b).round() as usize).max(1)).collect())
}

/// Closed-form risk triple at `psi` for a profile, level and target energies.
pub fn theory_point(
    profile: &CoefficientProfile,
    ell: usize,
    lambda: f64,
    energies: &BTreeMap<usize, f64>,
    sigma_sq: f64,
    psi: f64,
) -> Result<AsymptoticRisk> {
    let z = effective_regularization(profile, ell, lambda)?;
    risk_curves(RiskInputs {
        psi,
        zeta_star: z.zeta,
        f_ell_sq: energies.get(&ell).copied().unwrap_or(0.0),
        f_tail_sq: energies.range(ell + 1..).map(|(_, v)| v).sum(),
        sigma_sq,
        lambda,
        mu_ell: z.mu_ell,
    })
}

/// Index of grid cell `(g, t)` in the seed space.
pub fn cell_index(grid_index: usize, trial: usize) -> u64 {
    ((grid_index as u64) << 32) | trial as u64
}

/// One fresh draw of data, target and noise, fitted and scored.
pub fn run_trial(cfg: &SweepConfig, profile: &CoefficientProfile, n: usize, cell: u64) -> Result<TrialOutcome> {
    let ds = sample_dataset(cfg.domain, n, derive_seed(cfg.seed, stream::DATASET, cell));
    let target = draw_target(cfg.domain, &cfg.energies, &[], cfg.sigma_sq.sqrt(), derive_seed(cfg.seed, stream::TARGET, cell))?;
    let y = noisy_responses(&target, &ds, derive_seed(cfg.seed, stream::NOISE, cell))?;
    let fit = fit_krr(&ds, &cfg.kernel, cfg.lambda, &y)?;
    let test = match cfg.risk {
        RiskMethod::Exact => test_error_exact(&fit, &target, profile)?.total,
        RiskMethod::MonteCarlo { n_test } => {
            test_error_mc(&fit, &target, n_test, derive_seed(cfg.seed, stream::TEST_POINTS, cell))?.estimate
        }
    };
    Ok(TrialOutcome { test, train: fit.train_error(), rkhs_per_n: fit.rkhs_norm() / n as f64 })
}

/// Runs `f` over `0..count`, in parallel when the feature is enabled; output
/// order always follows the index.
pub fn map_cells<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Empirical risk curve over a grid of sample sizes, paired with theory.
pub fn descent_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter { name: "trials", reason: "must be at least 1".into() });
    }
    let profile = exact_risk_profile(&cfg.kernel, cfg.domain)?;
    let b = subspace_dim(cfg.domain, cfg.ell)? as f64;
    let cells = cfg.n_grid.len() * cfg.trials;
    let outcomes = map_cells(cells, |c| {
        let (g, t) = (c / cfg.trials, c % cfg.trials);
        run_trial(cfg, &profile, cfg.n_grid[g], cell_index(g, t))
    });
    let outcomes: Vec<TrialOutcome> = outcomes.into_iter().collect::<Result<_>>()?;
    cfg.n_grid
        .iter()
        .enumerate()
        .map(|(g, &n)| {
            let cell = &outcomes[g * cfg.trials..(g + 1) * cfg.trials];
            let test = mean_with_error(&cell.iter().map(|o| o.test).collect::<Vec<_>>());
            let train = mean_with_error(&cell.iter().map(|o| o.train).collect::<Vec<_>>());
            let rkhs = mean_with_error(&cell.iter().map(|o| o.rkhs_per_n).collect::<Vec<_>>());
            let psi = n as f64 / b;
            let th = theory_point(&profile, cfg.ell, cfg.lambda, &cfg.energies, cfg.sigma_sq, psi)?;
            Ok(SweepRow {
                n,
                psi_hat: psi,
                test_mean: test.estimate,
                test_se: test.std_error,
                train_mean: train.estimate,
                train_se: train.std_error,
                rkhs_mean: rkhs.estimate,
                rkhs_se: rkhs.std_error,
                theory_test: th.r_test,
                theory_train: th.r_train,
                theory_rkhs: th.rkhs_density,
            })
        })
        .collect()
}
