//! Empirical spectra of Gegenbauer kernel matrices, their distance to the
//! Marchenko-Pastur law, isometry defects, and concentration of quadratic
//! forms in the degree-`l` Fourier features.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::asymptotics::MpLaw;
use crate::domains::{subsets_of_size, subspace_dim, Dataset, Domain};
use crate::error::{Error, Result};
use crate::gegenbauer::{gegenbauer_matrices, GegenbauerEvaluator};
use crate::kernels::{kernel_matrix, polynomial_approximation, CoefficientProfile, KernelSpec};
use crate::linalg::{check_symmetric, sym_eigenvalues, sym_op_norm};
use crate::seed::rng_from_seed;

/// Eigenvalues below this fraction of the spectral scale count as exact zeros
/// when comparing against the atom of the MP law.
pub const ZERO_SNAP: f64 = 1e-9;

/// Full spectrum of a symmetric matrix, sorted ascending.
pub fn esd(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_symmetric(matrix, 1e-10)?;
    Ok(sym_eigenvalues(matrix))
}

/// Sup-distance between the empirical CDF of `eigenvalues` and `MP(psi)`.
pub fn ks_distance(eigenvalues: &[f64], psi: f64) -> Result<f64> {
    let law = MpLaw::new(psi)?;
    let n = eigenvalues.len();
    if n == 0 {
        return Ok(0.0);
    }
    let scale = eigenvalues.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut vals: Vec<f64> = eigenvalues
        .iter()
        .map(|&v| if v.abs() <= ZERO_SNAP * scale { 0.0 } else { v })
        .collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    let nf = n as f64;
    let mut worst = 0.0_f64;
    let mut i0 = 0;
    while i0 < n {
        let v = vals[i0];
        let mut i1 = i0 + 1;
        while i1 < n && vals[i1] == v {
            i1 += 1;
        }
        let after = (i1 as f64 / nf - law.cdf(v)).abs();
        let before = (i0 as f64 / nf - law.cdf_left(v)).abs();
        worst = worst.max(after).max(before);
        i0 = i1;
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub n: usize,
    #[serde(rename = "B")]
    pub b: u128,
    pub psi_hat: f64,
    pub ks_distance: f64,
    /// `(1/n) Tr Q_l`, read off the diagonal.
    pub trace_mean: f64,
}

/// Spectrum of `Q_l` on a dataset together with its KS distance to
/// `MP(n / B_l)`.
pub fn gegenbauer_spectrum(dataset: &Dataset, ell: usize) -> Result<SpectrumReport> {
    let ev = GegenbauerEvaluator::new(dataset.domain, ell)?;
    let q = gegenbauer_matrices(&ev, dataset, ell)?.pop().expect("degree l matrix");
    let n = dataset.n();
    let b = subspace_dim(dataset.domain, ell)?;
    let psi_hat = n as f64 / b as f64;
    let trace_mean = if n == 0 { 0.0 } else { q.trace() / n as f64 };
    let eigenvalues = esd(&q)?;
    let ks = ks_distance(&eigenvalues, psi_hat)?;
    Ok(SpectrumReport { eigenvalues, n, b, psi_hat, ks_distance: ks, trace_mean })
}

/// Number of samples giving aspect ratio `psi` at level `l`, at least 1.
pub fn samples_for_ratio(domain: Domain, ell: usize, psi: f64) -> Result<usize> {
    let b = subspace_dim(domain, ell)? as f64;
    Ok(((psi * b).round() as usize).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsometryDefects {
    /// `||Y_{<l}^T Y_{<l} / n - I||_op`
    pub low: f64,
    /// `||H_{>l} - mu_{>l} I||_op`
    pub high: f64,
}

/// Both isometry defects, computed from Gegenbauer matrices: the nonzero
/// spectrum of `Y Y^T / n = sum_{k<l} B_k Q_k / n` is that of `Y^T Y / n`.
pub fn isometry_defects(
    kernel: &KernelSpec,
    dataset: &Dataset,
    profile: &CoefficientProfile,
    ell: usize,
) -> Result<IsometryDefects> {
    if ell == 0 {
        return Err(Error::InvalidParameter { name: "ell", reason: "must be at least 1".into() });
    }
    let n = dataset.n();
    let domain = dataset.domain;
    let dims: Vec<u128> = (0..ell).map(|k| subspace_dim(domain, k)).collect::<Result<_>>()?;
    let m: u128 = dims.iter().sum();
    if (n as u128) <= m {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("need more than {m} samples for the low-degree isometry, got {n}"),
        });
    }
    let ev = GegenbauerEvaluator::new(domain, ell)?;
    let mats = gegenbauer_matrices(&ev, dataset, ell - 1)?;
    let mut gram_low = DMatrix::zeros(n, n);
    for (k, q) in mats.iter().enumerate() {
        gram_low += q * (dims[k] as f64 / n as f64);
    }
    let eig = sym_eigenvalues(&gram_low);
    let low = eig
        .iter()
        .rev()
        .take(m as usize)
        .fold(0.0_f64, |w, v| w.max((v - 1.0).abs()));
    let h = kernel_matrix(kernel, dataset);
    let high = sym_op_norm(&(h - polynomial_approximation(dataset, ell, profile)?));
    Ok(IsometryDefects { low, high })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuadFormMethod {
    MonteCarlo { samples: usize },
    ExactHypercube,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadFormVariance {
    pub variance: f64,
    /// Standard error of the Monte Carlo estimate; zero for the exact method.
    pub std_error: f64,
    /// `a^T 𝐁 a / B^2` over off-diagonal pairs (exact method).
    pub off_diagonal: f64,
    /// Contribution of the `S1 = S2` terms, identically zero on the hypercube
    /// where every `Y_S^2 = 1`.
    pub diagonal_correction: f64,
}

/// Largest level size accepted by the exact method.
pub const EXACT_QUADFORM_MAX_B: usize = 200;

fn check_quadform_input(domain: Domain, ell: usize, a: &DMatrix<f64>) -> Result<Vec<u64>> {
    if !domain.is_hypercube() {
        return Err(Error::Unsupported(
            "quadratic forms need an explicit degree-l basis, available only on the hypercube".into(),
        ));
    }
    let subsets = subsets_of_size(domain.d, ell);
    if a.nrows() != subsets.len() || a.ncols() != subsets.len() {
        return Err(Error::DimensionMismatch(format!(
            "A must be {0}x{0}, got {1}x{2}",
            subsets.len(),
            a.nrows(),
            a.ncols()
        )));
    }
    check_symmetric(a, 1e-12)?;
    Ok(subsets)
}

/// Variance of `Q(x) = Y_l(x)^T A Y_l(x) / B - Tr(A) / B` for uniform `x`.
pub fn quadratic_form_variance(
    domain: Domain,
    ell: usize,
    a: &DMatrix<f64>,
    method: QuadFormMethod,
    seed: u64,
) -> Result<QuadFormVariance> {
    let subsets = check_quadform_input(domain, ell, a)?;
    let b = subsets.len() as f64;
    match method {
        QuadFormMethod::ExactHypercube => {
            if subsets.len() > EXACT_QUADFORM_MAX_B {
                return Err(Error::Unsupported(format!(
                    "exact method limited to B <= {EXACT_QUADFORM_MAX_B}, got {}",
                    subsets.len()
                )));
            }
            // sum_T c_T^2 with c_T the total weight of ordered pairs with
            // S1 Δ S2 = T; equal to a^T 𝐁 a
            let mut c: HashMap<u64, f64> = HashMap::new();
            for (i, si) in subsets.iter().enumerate() {
                for (j, sj) in subsets.iter().enumerate() {
                    if i != j && a[(i, j)] != 0.0 {
                        *c.entry(si ^ sj).or_insert(0.0) += a[(i, j)];
                    }
                }
            }
            let mut keys: Vec<u64> = c.keys().copied().collect();
            keys.sort_unstable();
            let off_diagonal = keys.iter().map(|t| c[t] * c[t]).sum::<f64>() / (b * b);
            Ok(QuadFormVariance { variance: off_diagonal, std_error: 0.0, off_diagonal, diagonal_correction: 0.0 })
        }
        QuadFormMethod::MonteCarlo { samples } => {
            if samples < 2 {
                return Err(Error::InvalidParameter { name: "samples", reason: "need at least 2".into() });
            }
            let mut rng = rng_from_seed(seed);
            let full = if domain.d == 64 { u64::MAX } else { (1u64 << domain.d) - 1 };
            let trace = a.trace();
            let mut y = vec![0.0; subsets.len()];
            let mut values = Vec::with_capacity(samples);
            for _ in 0..samples {
                let mask = rng.random::<u64>() & full;
                for (v, s) in y.iter_mut().zip(&subsets) {
                    *v = crate::domains::monomial(mask, *s);
                }
                let mut q = 0.0;
                for i in 0..y.len() {
                    let row: f64 = (0..y.len()).map(|j| a[(i, j)] * y[j]).sum();
                    q += y[i] * row;
                }
                values.push((q - trace) / b);
            }
            let (variance, std_error) = variance_with_error(&values);
            Ok(QuadFormVariance { variance, std_error, off_diagonal: f64::NAN, diagonal_correction: f64::NAN })
        }
    }
}

/// Sample variance and the large-sample standard error
/// `sqrt((m4 - s^4) / N)` of that variance.
pub fn variance_with_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let var = m2 * n / (n - 1.0);
    let se = ((m4 - m2 * m2).max(0.0) / n).sqrt();
    (var, se)
}

/// Dense incidence matrix over ordered pairs `(S1, S2)`, `S1 != S2`, with
/// entry 1 iff `S1 Δ S2 = S3 Δ S4`, and the matching vector of `A` entries.
pub fn pair_incidence(subsets: &[u64], a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let mut pairs = Vec::new();
    let mut weights = Vec::new();
    for (i, si) in subsets.iter().enumerate() {
        for (j, sj) in subsets.iter().enumerate() {
            if i != j {
                pairs.push(si ^ sj);
                weights.push(a[(i, j)]);
            }
        }
    }
    let m = pairs.len();
    let inc = DMatrix::from_fn(m, m, |p, q| if pairs[p] == pairs[q] { 1.0 } else { 0.0 });
    (inc, weights)
}

/// Random orthogonal projection of the given rank in dimension `b`.
pub fn random_projection(b: usize, rank: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng_from_seed(seed);
    let g = DMatrix::from_fn(b, rank.min(b), |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    let mut p = &q * q.transpose();
    // symmetrize away roundoff
    let pt = p.transpose();
    p = (p + pt) * 0.5;
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::sample_dataset;
    use crate::kernels::compute_profile;

    #[test]
    fn esd_small_examples() {
        assert_eq!(esd(&DMatrix::identity(5, 5)).unwrap(), vec![1.0; 5]);
        let ones = esd(&DMatrix::from_element(4, 4, 1.0)).unwrap();
        for (v, e) in ones.iter().zip([0.0, 0.0, 0.0, 4.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        let swap = esd(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!((swap[0] + 1.0).abs() < 1e-14 && (swap[1] - 1.0).abs() < 1e-14);
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(esd(&bad), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn ks_of_degenerate_spectrum() {
        let d = ks_distance(&[1.0; 10], 1.0).unwrap();
        assert_eq!(d, MpLaw::new(1.0).unwrap().cdf(1.0));
    }

    #[test]
    fn ks_of_quantiles() {
        let n = 1000;
        let law = MpLaw::new(1.0).unwrap();
        let q: Vec<f64> = (0..n).map(|i| law.quantile((i as f64 + 0.5) / n as f64)).collect();
        assert!(ks_distance(&q, 1.0).unwrap() <= 0.5 / n as f64 + 1e-6);
    }

    #[test]
    fn ks_handles_the_atom() {
        // half zeros and the bulk quantiles at psi = 2
        let law = MpLaw::new(2.0).unwrap();
        let n = 400;
        let mut v: Vec<f64> = vec![1e-13; n / 2];
        v.extend((0..n / 2).map(|i| law.quantile(0.5 + (i as f64 + 0.5) / n as f64)));
        assert!(ks_distance(&v, 2.0).unwrap() <= 0.5 / n as f64 + 1e-6);
    }

    #[test]
    fn gegenbauer_report_trace() {
        let ds = sample_dataset(Domain::hypercube(12).unwrap(), 66, 3);
        let rep = gegenbauer_spectrum(&ds, 2).unwrap();
        assert_eq!(rep.trace_mean, 1.0);
        assert_eq!(rep.psi_hat, 1.0);
        let mean = rep.eigenvalues.iter().sum::<f64>() / rep.n as f64;
        assert!((mean - 1.0).abs() < 1e-10);
        assert!(rep.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn constants_are_an_exact_isometry() {
        let dom = Domain::hypercube(10).unwrap();
        let ds = sample_dataset(dom, 20, 1);
        let kern = KernelSpec::exponential();
        let p = compute_profile(&kern, dom, 10, 0).unwrap();
        let def = isometry_defects(&kern, &ds, &p, 1).unwrap();
        assert!(def.low < 1e-12);
        let quad = KernelSpec::Polynomial { a: 1.0, b: 1.0, p: 2 };
        let pq = compute_profile(&quad, dom, 10, 0).unwrap();
        assert!(isometry_defects(&quad, &ds, &pq, 2).unwrap().high <= 1e-8);
        let tiny = sample_dataset(dom, 5, 1);
        assert!(isometry_defects(&kern, &tiny, &p, 2).is_err());
    }

    #[test]
    fn identity_form_has_zero_variance() {
        let dom = Domain::hypercube(8).unwrap();
        let v = quadratic_form_variance(dom, 2, &DMatrix::identity(28, 28), QuadFormMethod::ExactHypercube, 0).unwrap();
        assert_eq!(v.variance, 0.0);
        let mc = quadratic_form_variance(dom, 2, &DMatrix::identity(28, 28), QuadFormMethod::MonteCarlo { samples: 500 }, 0).unwrap();
        assert_eq!(mc.variance, 0.0);
    }

    #[test]
    fn diagonal_form_has_no_off_diagonal_part() {
        let dom = Domain::hypercube(7).unwrap();
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(21, |i, _| (i as f64) / 21.0));
        let v = quadratic_form_variance(dom, 2, &a, QuadFormMethod::ExactHypercube, 0).unwrap();
        assert_eq!(v.off_diagonal, 0.0);
        assert_eq!(v.variance, v.diagonal_correction);
    }

    #[test]
    fn pair_sums_match_dense_incidence() {
        let dom = Domain::hypercube(6).unwrap();
        let a = random_projection(15, 7, 11);
        let subsets = subsets_of_size(6, 2);
        let (inc, w) = pair_incidence(&subsets, &a);
        let wv = nalgebra::DVector::from_vec(w);
        let dense = (wv.transpose() * &inc * &wv)[(0, 0)] / (15.0 * 15.0);
        let v = quadratic_form_variance(dom, 2, &a, QuadFormMethod::ExactHypercube, 0).unwrap();
        assert!((dense - v.variance).abs() < 1e-12 * dense.max(1.0));
    }

    #[test]
    fn projection_is_a_contraction() {
        let p = random_projection(20, 10, 4);
        let ev = sym_eigenvalues(&p);
        assert!(ev.iter().all(|v| *v > -1e-12 && *v < 1.0 + 1e-12));
        assert!((p.trace() - 10.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_forms_are_unsupported() {
        let dom = Domain::sphere(5).unwrap();
        let r = quadratic_form_variance(dom, 1, &DMatrix::identity(5, 5), QuadFormMethod::ExactHypercube, 0);
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}
