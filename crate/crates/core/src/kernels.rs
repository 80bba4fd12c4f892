//! Inner-product kernels `H(x, y) = h(<x, y> / d)` and their Gegenbauer
//! coefficient profiles.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::domains::{binomial, gram, subspace_dim, Dataset, Domain, DomainKind, marginal_measure};
use crate::error::{Error, Result};
use crate::gegenbauer::{self, krawtchouk, GegenbauerEvaluator};
use crate::linalg::sym_op_norm;

pub const DEFAULT_QUADRATURE_ORDER: usize = 200;

/// Tolerance below which a coefficient counts as negative.
const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `h(t) = exp(c t)`
    Exponential { c: f64 },
    /// `h(t) = exp(-gamma (2 - 2t))`, the Euclidean RBF kernel on the rescaled sphere.
    SphereRbf { gamma: f64 },
    /// `h(t) = (a t + b)^p`
    Polynomial { a: f64, b: f64, p: u32 },
    /// `h(t) = sum_k mu_k Q_k(d t)` on a fixed domain.
    Tabulated { domain: Domain, mu: Vec<f64> },
}

impl KernelSpec {
    pub fn exponential() -> Self {
        KernelSpec::Exponential { c: 1.0 }
    }

    pub fn linear() -> Self {
        KernelSpec::Polynomial { a: 1.0, b: 0.0, p: 1 }
    }

    pub fn h(&self, t: f64) -> f64 {
        match self {
            KernelSpec::Exponential { c } => (c * t).exp(),
            KernelSpec::SphereRbf { gamma } => (-gamma * (2.0 - 2.0 * t)).exp(),
            KernelSpec::Polynomial { a, b, p } => (a * t + b).powi(*p as i32),
            KernelSpec::Tabulated { domain, mu } => {
                if mu.is_empty() {
                    return 0.0;
                }
                let ev = GegenbauerEvaluator::new(*domain, mu.len() - 1)
                    .expect("tabulated kernel degree fits its domain");
                let q = ev.eval_recurrence((domain.d as f64 * t).clamp(-(domain.d as f64), domain.d as f64));
                mu.iter().zip(&q).map(|(m, v)| m * v).sum()
            }
        }
    }

    pub fn h_at_one(&self) -> f64 {
        match self {
            KernelSpec::Tabulated { mu, .. } => mu.iter().sum(),
            _ => self.h(1.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Exponential { .. } => "exponential",
            KernelSpec::SphereRbf { .. } => "sphere_rbf",
            KernelSpec::Polynomial { .. } => "polynomial",
            KernelSpec::Tabulated { .. } => "tabulated",
        }
    }

    /// Degree of the kernel as a polynomial in `t`, if it is one.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match self {
            KernelSpec::Polynomial { p, .. } => Some(*p as usize),
            KernelSpec::Tabulated { mu, .. } => Some(mu.len().saturating_sub(1)),
            _ => None,
        }
    }
}

/// Gegenbauer coefficients `xi_{d,k}` and masses `mu_{d,k} = xi_{d,k} B_k`
/// for `k <= K`, together with `h(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientProfile {
    pub domain: Domain,
    pub xi: Vec<f64>,
    pub mu: Vec<f64>,
    pub h1: f64,
    /// Degrees whose coefficient is negative beyond tolerance.
    pub non_psd_degrees: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ProfileDocument {
    domain: DomainKind,
    d: usize,
    #[serde(rename = "K")]
    k: usize,
    xi: Vec<f64>,
    mu: Vec<f64>,
    h1: f64,
}

impl CoefficientProfile {
    pub fn max_degree(&self) -> usize {
        self.mu.len() - 1
    }

    /// `mu_{>l} = h(1) - sum_{k <= l} mu_k`.
    pub fn tail(&self, ell: usize) -> f64 {
        self.h1 - self.mu.iter().take(ell + 1).sum::<f64>()
    }

    pub fn is_psd(&self) -> bool {
        self.non_psd_degrees.is_empty()
    }

    /// Hypercube masses `mu_{d, d-k}` for `k <= ell` (empty on the sphere or
    /// when the profile stops short of degree `d - ell`).
    pub fn high_frequency_masses(&self, ell: usize) -> Vec<f64> {
        let d = self.domain.d;
        if !self.domain.is_hypercube() || self.max_degree() < d {
            return Vec::new();
        }
        (0..=ell.min(d)).map(|k| self.mu[d - k]).collect()
    }

    /// `min_{k < l} xi_{d,k} d^l`, which must diverge with `d` for a
    /// kernel to be generic at level `l`.
    pub fn low_degree_floor(&self, ell: usize) -> f64 {
        let scale = (self.domain.d as f64).powi(ell as i32);
        self.xi
            .iter()
            .take(ell)
            .fold(f64::INFINITY, |m, x| m.min(*x))
            * scale
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ProfileDocument {
            domain: self.domain.kind,
            d: self.domain.d,
            k: self.max_degree(),
            xi: self.xi.clone(),
            mu: self.mu.clone(),
            h1: self.h1,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ProfileDocument = serde_json::from_str(s)?;
        let domain = Domain::new(doc.domain, doc.d)?;
        if doc.xi.len() != doc.k + 1 || doc.mu.len() != doc.k + 1 {
            return Err(Error::Serialization("xi/mu length does not match K".into()));
        }
        let non_psd_degrees = negative_degrees(&doc.xi, doc.h1);
        Ok(Self { domain, xi: doc.xi, mu: doc.mu, h1: doc.h1, non_psd_degrees })
    }
}

fn negative_degrees(xi: &[f64], h1: f64) -> Vec<usize> {
    let tol = PSD_TOL * h1.abs().max(1.0);
    xi.iter()
        .enumerate()
        .filter(|(_, x)| **x < -tol)
        .map(|(k, _)| k)
        .collect()
}

/// Cutoff used for sphere profiles when only levels up to `ell` matter.
pub fn default_cutoff(domain: Domain, ell: usize) -> usize {
    match domain.kind {
        DomainKind::Hypercube => domain.d,
        DomainKind::Sphere => (ell + 6).min(domain.d),
    }
}

/// `xi_{d,k} = E[h(t/d) Q_k(t)]` under the marginal law of `t = <1, x>`.
///
/// On the hypercube the expectation is a finite sum over the `d + 1` atoms
/// and `mu_k = 2^{-d} sum_j C(d, j) K_k(j) h((d - 2j)/d)` is formed from
/// exact integer weights. On the sphere the masses come from the power
/// series of `h` when it is known, and otherwise from a Gauss rule of the
/// given order.
pub fn compute_profile(
    kernel: &KernelSpec,
    domain: Domain,
    max_k: usize,
    quadrature_order: usize,
) -> Result<CoefficientProfile> {
    let h1 = kernel.h_at_one();
    let d = domain.d;
    let (xi, mu) = match domain.kind {
        DomainKind::Hypercube => {
            if max_k > d {
                return Err(Error::DegreeOutOfRange { degree: max_k, max: d });
            }
            let scale = 0.5_f64.powi(d as i32);
            let h_atoms: Vec<f64> = (0..=d)
                .map(|j| kernel.h((d as f64 - 2.0 * j as f64) / d as f64))
                .collect();
            let mut xi = Vec::with_capacity(max_k + 1);
            let mut mu = Vec::with_capacity(max_k + 1);
            for k in 0..=max_k {
                let m: f64 = (0..=d)
                    .map(|j| {
                        let w = binomial(d as u64, j as u64) as i128 * krawtchouk(d, k, j);
                        w as f64 * h_atoms[j]
                    })
                    .sum::<f64>()
                    * scale;
                let bk = subspace_dim(domain, k)? as f64;
                mu.push(m);
                xi.push(m / bk);
            }
            (xi, mu)
        }
        DomainKind::Sphere if taylor_coefficients(kernel, 0).is_some() => {
            let mu = sphere_masses_from_series(kernel, d, max_k);
            let xi = mu
                .iter()
                .enumerate()
                .map(|(k, m)| Ok(m / subspace_dim(domain, k)? as f64))
                .collect::<Result<Vec<f64>>>()?;
            (xi, mu)
        }
        DomainKind::Sphere => {
            let xi = sphere_coefficients_by_quadrature(kernel, domain, max_k, quadrature_order)?;
            let mu = xi
                .iter()
                .enumerate()
                .map(|(k, x)| Ok(x * subspace_dim(domain, k)? as f64))
                .collect::<Result<Vec<f64>>>()?;
            (xi, mu)
        }
    };
    let non_psd_degrees = negative_degrees(&xi, h1);
    Ok(CoefficientProfile { domain, xi, mu, h1, non_psd_degrees })
}

fn sphere_coefficients_by_quadrature(
    kernel: &KernelSpec,
    domain: Domain,
    max_k: usize,
    quadrature_order: usize,
) -> Result<Vec<f64>> {
    let measure = marginal_measure(domain, quadrature_order);
    let ev = GegenbauerEvaluator::new(domain, max_k)?;
    let mut xi = vec![0.0; max_k + 1];
    let mut buf = vec![0.0; max_k + 1];
    for (t, w) in measure.nodes.iter().zip(&measure.weights) {
        ev.eval_into(*t, &mut buf);
        let hv = kernel.h(t / domain.d as f64);
        for k in 0..=max_k {
            xi[k] += w * hv * buf[k];
        }
    }
    Ok(xi)
}

/// Coefficient of `t^m` in the power series of `h`, for kernels that have
/// one in closed form.
fn taylor_coefficients(kernel: &KernelSpec, m: usize) -> Option<f64> {
    let fact = |m: usize| (1..=m).fold(1.0_f64, |a, i| a * i as f64);
    match kernel {
        KernelSpec::Exponential { c } => Some(c.powi(m as i32) / fact(m)),
        KernelSpec::SphereRbf { gamma } => Some((-2.0 * gamma).exp() * (2.0 * gamma).powi(m as i32) / fact(m)),
        KernelSpec::Polynomial { a, b, p } => {
            let p = *p as usize;
            Some(if m > p {
                0.0
            } else {
                binomial(p as u64, m as u64) as f64 * a.powi(m as i32) * b.powi((p - m) as i32)
            })
        }
        KernelSpec::Tabulated { .. } => None,
    }
}

/// Sphere masses from the power series of `h`.
///
/// `t^m` splits over the normalized polynomials `Q_k(d t) / Q_k(d)` with
/// nonnegative weights summing to one, obtained by applying
/// `t q_k = (k + d - 2)/(2k + d - 2) q_{k+1} + k/(2k + d - 2) q_{k-1}`
/// `m` times. Quadrature instead loses everything to cancellation once
/// `B_k` is large.
fn sphere_masses_from_series(kernel: &KernelSpec, d: usize, max_k: usize) -> Vec<f64> {
    const MAX_TERMS: usize = 4000;
    let scale = kernel.h_at_one().abs().max(f64::MIN_POSITIVE);
    let mut mu = vec![0.0; max_k + 1];
    let mut weights = vec![1.0];
    let dd = d as f64;
    for m in 0..MAX_TERMS {
        let a = taylor_coefficients(kernel, m).unwrap_or(0.0);
        for (k, w) in weights.iter().enumerate().take(max_k + 1) {
            mu[k] += a * w;
        }
        if let Some(p) = kernel.polynomial_degree() {
            if m >= p {
                break;
            }
        } else if m > max_k && a.abs() < 1e-20 * scale && taylor_coefficients(kernel, m + 1).unwrap_or(0.0).abs() <= a.abs() {
            break;
        }
        let mut next = vec![0.0; weights.len() + 1];
        for (k, w) in weights.iter().enumerate() {
            let kf = k as f64;
            let denom = 2.0 * kf + dd - 2.0;
            next[k + 1] += w * (kf + dd - 2.0) / denom;
            if k > 0 {
                next[k - 1] += w * kf / denom;
            }
        }
        weights = next;
    }
    mu
}

/// `H_ij = h(<x_i, x_j> / d)`; the diagonal is exactly `h(1)`.
pub fn kernel_matrix(kernel: &KernelSpec, dataset: &Dataset) -> DMatrix<f64> {
    let n = dataset.n();
    let d = dataset.d();
    let h1 = kernel.h_at_one();
    let mut h = DMatrix::zeros(n, n);
    if dataset.domain.is_hypercube() {
        let table: Vec<f64> = (0..=d)
            .map(|j| kernel.h((d as f64 - 2.0 * j as f64) / d as f64))
            .collect();
        let masks = dataset.sign_masks().expect("hypercube dataset");
        for i in 0..n {
            h[(i, i)] = h1;
            for j in (i + 1)..n {
                let v = table[(masks[i] ^ masks[j]).count_ones() as usize];
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
    } else {
        let g = gram(dataset);
        for i in 0..n {
            h[(i, i)] = h1;
            for j in (i + 1)..n {
                let v = kernel.h((g[(i, j)] / d as f64).clamp(-1.0, 1.0));
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
    }
    h
}

/// `sum_{k <= l} mu_k Q_k + mu_{>l} I` on a dataset.
pub fn polynomial_approximation(
    dataset: &Dataset,
    ell: usize,
    profile: &CoefficientProfile,
) -> Result<DMatrix<f64>> {
    if profile.domain != dataset.domain {
        return Err(Error::DimensionMismatch("profile and dataset domains differ".into()));
    }
    if profile.max_degree() < ell {
        return Err(Error::DegreeOutOfRange { degree: ell, max: profile.max_degree() });
    }
    let ev = GegenbauerEvaluator::new(dataset.domain, ell)?;
    let mats = gegenbauer::gegenbauer_matrices(&ev, dataset, ell)?;
    let n = dataset.n();
    let mut approx = DMatrix::identity(n, n) * profile.tail(ell);
    for (k, q) in mats.iter().enumerate() {
        approx += q * profile.mu[k];
    }
    Ok(approx)
}

/// `||H - (sum_{k <= l} mu_k Q_k + mu_{>l} I)||_op`.
pub fn poly_approx_defect(
    kernel: &KernelSpec,
    dataset: &Dataset,
    ell: usize,
    profile: &CoefficientProfile,
) -> Result<f64> {
    let h = kernel_matrix(kernel, dataset);
    let approx = polynomial_approximation(dataset, ell, profile)?;
    Ok(sym_op_norm(&(h - approx)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveRegularization {
    pub zeta: f64,
    pub lambda: f64,
    pub tail: f64,
    pub mu_ell: f64,
    /// False when the kernel has no mass above level `l` (degree-`l`
    /// polynomial kernels): interpolation then has no implicit ridge.
    pub self_regularized: bool,
}

/// `zeta = (lambda + mu_{>l}) / mu_l`.
pub fn effective_regularization(
    profile: &CoefficientProfile,
    ell: usize,
    lambda: f64,
) -> Result<EffectiveRegularization> {
    if ell > profile.max_degree() {
        return Err(Error::DegreeOutOfRange { degree: ell, max: profile.max_degree() });
    }
    let mu_ell = profile.mu[ell];
    if !(mu_ell > 0.0) {
        return Err(Error::DegenerateLevel { ell, mu: mu_ell });
    }
    let mut tail = profile.tail(ell);
    let self_regularized = tail > 1e-12 * profile.h1.abs().max(1.0);
    if tail.abs() <= 1e-12 * profile.h1.abs().max(1.0) {
        tail = 0.0;
    }
    Ok(EffectiveRegularization {
        zeta: (lambda + tail) / mu_ell,
        lambda,
        tail,
        mu_ell,
        self_regularized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::sample_dataset;
    use std::f64::consts::E;

    fn cube(d: usize) -> Domain {
        Domain::hypercube(d).unwrap()
    }

    #[test]
    fn sphere_series_matches_quadrature_at_low_degree() {
        let kernels = [
            KernelSpec::exponential(),
            KernelSpec::SphereRbf { gamma: 0.7 },
            KernelSpec::Polynomial { a: 2.0, b: -0.5, p: 5 },
        ];
        for k in &kernels {
            for d in [3usize, 7, 20] {
                let dom = Domain::sphere(d).unwrap();
                let p = compute_profile(k, dom, 6, 0).unwrap();
                let quad = sphere_coefficients_by_quadrature(k, dom, 6, 300).unwrap();
                for (a, b) in p.xi.iter().zip(&quad) {
                    assert!((a - b).abs() < 1e-12, "{} d={d}: {a} vs {b}", k.name());
                }
            }
        }
    }

    #[test]
    fn exponential_on_two_cube() {
        // atoms t/d in {1, 0, -1} with weights (1/4, 1/2, 1/4);
        // Q_1 = t/2, Q_2 = (t^2 - 2)/2
        let p = compute_profile(&KernelSpec::exponential(), cube(2), 2, 0).unwrap();
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        assert!((p.mu[1] - s).abs() < 1e-12);
        assert!((p.mu[0] - (c + 1.0) / 2.0).abs() < 1e-12);
        assert!((p.mu[2] - (c - 1.0) / 2.0).abs() < 1e-12);
        assert!((p.mu.iter().sum::<f64>() - E).abs() < 1e-12);
    }

    #[test]
    fn linear_kernel_is_pure_degree_one() {
        for dom in [cube(8), Domain::sphere(8).unwrap()] {
            let p = compute_profile(&KernelSpec::linear(), dom, 5, 200).unwrap();
            for (k, x) in p.xi.iter().enumerate() {
                let expected = if k == 1 { 1.0 / 8.0 } else { 0.0 };
                assert!((x - expected).abs() < 1e-12, "{dom:?} k={k} xi={x}");
            }
        }
    }

    #[test]
    fn trace_identity_and_reconstruction_on_cube() {
        let kernels = [
            KernelSpec::exponential(),
            KernelSpec::SphereRbf { gamma: 0.5 },
            KernelSpec::Polynomial { a: 1.0, b: 1.0, p: 3 },
        ];
        for kern in &kernels {
            for d in [5usize, 12, 30] {
                let p = compute_profile(kern, cube(d), d, 0).unwrap();
                assert!(p.tail(d).abs() < 1e-8, "{kern:?} d={d}");
                let ev = GegenbauerEvaluator::new(cube(d), d).unwrap();
                for j in 0..=d {
                    let t = d as f64 - 2.0 * j as f64;
                    let recon: f64 = (0..=d).map(|k| p.mu[k] * ev.at_atom(k, j)).sum();
                    assert!((recon - kern.h(t / d as f64)).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn builtin_kernels_have_positive_coefficients() {
        for kern in [KernelSpec::exponential(), KernelSpec::SphereRbf { gamma: 1.0 }] {
            let p = compute_profile(&kern, Domain::sphere(15).unwrap(), 8, 200).unwrap();
            assert!(p.xi.iter().all(|x| *x > 0.0), "{kern:?}");
            assert!(p.tail(8) >= -1e-8);
            let p = compute_profile(&kern, cube(10), 10, 0).unwrap();
            assert!(p.xi.iter().all(|x| *x > 0.0), "{kern:?} {:?}", p.xi);
        }
    }

    #[test]
    fn sphere_masses_approach_taylor_coefficients() {
        // mu_{d,k} -> h^{(k)}(0) / k! for h = exp
        let kern = KernelSpec::exponential();
        for (k, limit) in [(1usize, 1.0), (2, 0.5)] {
            let gaps: Vec<f64> = [50usize, 200, 800]
                .iter()
                .map(|d| {
                    let p = compute_profile(&kern, Domain::sphere(*d).unwrap(), 4, 200).unwrap();
                    (p.mu[k] - limit).abs()
                })
                .collect();
            assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "k={k} {gaps:?}");
            assert!(gaps[2] < 0.01);
        }
    }

    #[test]
    fn low_degree_floor_diverges() {
        let kern = KernelSpec::exponential();
        for ell in 1..=3 {
            let v: Vec<f64> = [12usize, 24, 48]
                .iter()
                .map(|d| compute_profile(&kern, cube(*d), ell, 0).unwrap().low_degree_floor(ell))
                .collect();
            assert!(v[0] < v[1] && v[1] < v[2], "ell={ell} {v:?}");
        }
    }

    #[test]
    fn kernel_matrix_examples() {
        let dom = cube(4);
        let ds = Dataset::from_rows(dom, &[vec![1.0; 4], vec![-1.0; 4], vec![1.0, -1.0, 1.0, 1.0]]).unwrap();
        let h = kernel_matrix(&KernelSpec::exponential(), &ds);
        for i in 0..3 {
            assert_eq!(h[(i, i)], E);
        }
        assert!((h[(0, 1)] - (-1f64).exp()).abs() < 1e-15);
        let lin = kernel_matrix(&KernelSpec::linear(), &ds);
        let g = gram(&ds) / 4.0;
        assert_eq!(lin, g);
    }

    #[test]
    fn polynomial_kernel_has_no_defect() {
        let dom = cube(10);
        let kern = KernelSpec::Polynomial { a: 1.0, b: 0.5, p: 2 };
        let p = compute_profile(&kern, dom, 10, 0).unwrap();
        let ds = sample_dataset(dom, 30, 2);
        assert!(poly_approx_defect(&kern, &ds, 2, &p).unwrap() <= 1e-8);
        let single = sample_dataset(dom, 1, 2);
        assert!(poly_approx_defect(&KernelSpec::exponential(), &single, 2, &compute_profile(&KernelSpec::exponential(), dom, 10, 0).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn effective_regularization_cases() {
        let p = CoefficientProfile {
            domain: cube(4),
            xi: vec![0.0, 0.25],
            mu: vec![0.0, 1.0],
            h1: 1.5,
            non_psd_degrees: vec![],
        };
        let z = effective_regularization(&p, 1, 0.0).unwrap();
        assert_eq!(z.zeta, 0.5);
        assert!(z.self_regularized);

        let quad = KernelSpec::Polynomial { a: 1.0, b: 1.0, p: 2 };
        let pq = compute_profile(&quad, cube(6), 6, 0).unwrap();
        let z = effective_regularization(&pq, 2, 0.0).unwrap();
        assert_eq!(z.zeta, 0.0);
        assert!(!z.self_regularized);

        let pe = compute_profile(&KernelSpec::exponential(), cube(2), 2, 0).unwrap();
        let z = effective_regularization(&pe, 1, 0.0).unwrap();
        let expected = (1f64.cosh() - 1.0) / (2.0 * 1f64.sinh());
        assert!((z.zeta - expected).abs() < 1e-12);
        assert!((z.zeta - 0.2310).abs() < 1e-4);

        let lin = compute_profile(&KernelSpec::linear(), cube(6), 6, 0).unwrap();
        assert!(matches!(effective_regularization(&lin, 2, 0.1), Err(Error::DegenerateLevel { .. })));
    }

    #[test]
    fn tabulated_profile_is_recovered() {
        let dom = cube(6);
        let mu = vec![0.5, 1.0, -0.2, 0.1];
        let kern = KernelSpec::Tabulated { domain: dom, mu: mu.clone() };
        let p = compute_profile(&kern, dom, 6, 0).unwrap();
        for k in 0..=6 {
            let expected = mu.get(k).copied().unwrap_or(0.0);
            assert!((p.mu[k] - expected).abs() < 1e-12);
        }
        assert_eq!(p.non_psd_degrees, vec![2]);
        assert!(!p.is_psd());
    }

    #[test]
    fn json_round_trip() {
        let p = compute_profile(&KernelSpec::exponential(), Domain::sphere(11).unwrap(), 6, 200).unwrap();
        let back = CoefficientProfile::from_json(&p.to_json().unwrap()).unwrap();
        for (a, b) in p.mu.iter().zip(&back.mu).chain(p.xi.iter().zip(&back.xi)) {
            assert!((a - b).abs() <= 1e-15 * a.abs());
        }
        assert_eq!(p.h1, back.h1);
        assert_eq!(p.domain, back.domain);
    }
}
