//! Normalized Gegenbauer polynomials `Q_k^{(d)}` on `[-d, d]` with `Q_k(d) = 1`.
//!
//! On the sphere these are ultraspherical polynomials with parameter
//! `(d - 2) / 2` evaluated at `t / d`. On the hypercube they are normalized
//! binary Krawtchouk polynomials; at the lattice points `t = d - 2j` the
//! values come from an exact integer alternating sum.

use nalgebra::DMatrix;

use crate::domains::{binomial, gram, subspace_dim, Dataset, Domain, DomainKind, marginal_measure};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEGREE: usize = 8;

/// Exact Krawtchouk value `K_k(j) = sum_i (-1)^i C(j, i) C(d - j, k - i)`.
pub fn krawtchouk(d: usize, k: usize, j: usize) -> i128 {
    let (d, k, j) = (d as u64, k as u64, j as u64);
    let mut acc: i128 = 0;
    for i in 0..=k.min(j) {
        if k - i > d - j {
            continue;
        }
        let term = (binomial(j, i) * binomial(d - j, k - i)) as i128;
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

#[derive(Debug, Clone)]
pub struct GegenbauerEvaluator {
    domain: Domain,
    max_degree: usize,
    /// hypercube only: `atoms[k][j] = Q_k(d - 2j)`
    atoms: Option<Vec<Vec<f64>>>,
}

impl GegenbauerEvaluator {
    pub fn new(domain: Domain, max_degree: usize) -> Result<Self> {
        let atoms = match domain.kind {
            DomainKind::Hypercube => {
                if max_degree > domain.d {
                    return Err(Error::DegreeOutOfRange { degree: max_degree, max: domain.d });
                }
                let d = domain.d;
                Some(
                    (0..=max_degree)
                        .map(|k| {
                            let norm = binomial(d as u64, k as u64) as f64;
                            (0..=d).map(|j| krawtchouk(d, k, j) as f64 / norm).collect()
                        })
                        .collect(),
                )
            }
            DomainKind::Sphere => None,
        };
        Ok(Self { domain, max_degree, atoms })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `Q_k(d - 2j)` from the exact table (hypercube only).
    pub fn at_atom(&self, k: usize, j: usize) -> f64 {
        self.atoms.as_ref().expect("hypercube evaluator")[k][j]
    }

    /// Table of `Q_k(d - 2j)` for all `k <= K`, `j <= d` (hypercube only).
    pub fn atom_table(&self) -> Option<&[Vec<f64>]> {
        self.atoms.as_deref()
    }

    /// `Q_0(t), .., Q_K(t)`.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let d = self.domain.d as f64;
        if !(t.abs() <= d * (1.0 + 1e-12)) {
            return Err(Error::ArgumentOutOfRange { value: t, d: self.domain.d });
        }
        let mut out = vec![0.0; self.max_degree + 1];
        self.eval_into(t.clamp(-d, d), &mut out);
        Ok(out)
    }

    /// Unchecked evaluation into `out` (length `K + 1`).
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let d = self.domain.d;
        if let Some(atoms) = &self.atoms {
            let j2 = d as f64 - t;
            if j2 >= 0.0 && j2.fract() == 0.0 && (j2 as usize) % 2 == 0 {
                let j = j2 as usize / 2;
                for (k, o) in out.iter_mut().enumerate() {
                    *o = atoms[k][j];
                }
                return;
            }
        }
        recurrence(self.domain, t, out);
    }

    /// Evaluation through the three-term recurrence only, bypassing the table.
    pub fn eval_recurrence(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.max_degree + 1];
        recurrence(self.domain, t, &mut out);
        out
    }
}

fn recurrence(domain: Domain, t: f64, out: &mut [f64]) {
    let kmax = out.len() - 1;
    out[0] = 1.0;
    if kmax == 0 {
        return;
    }
    let d = domain.d as f64;
    out[1] = t / d;
    match domain.kind {
        DomainKind::Hypercube => {
            // Q_{k+1} = (t Q_k - k Q_{k-1}) / (d - k)
            for k in 1..kmax {
                let kf = k as f64;
                out[k + 1] = (t * out[k] - kf * out[k - 1]) / (d - kf);
            }
        }
        DomainKind::Sphere => {
            // P_{k+1}(s) = ((2k + d - 2) s P_k - k P_{k-1}) / (k + d - 2), s = t / d
            let s = t / d;
            for k in 1..kmax {
                let kf = k as f64;
                out[k + 1] = ((2.0 * kf + d - 2.0) * s * out[k] - kf * out[k - 1]) / (kf + d - 2.0);
            }
        }
    }
}

/// Entrywise `Q_k` applied to the Gram matrix of `dataset`.
pub fn gegenbauer_matrix(eval: &GegenbauerEvaluator, dataset: &Dataset, k: usize) -> Result<DMatrix<f64>> {
    Ok(gegenbauer_matrices(eval, dataset, k)?.pop().expect("k + 1 matrices"))
}

/// `[Q_0, .., Q_K]` on a dataset in one pass per entry.
pub fn gegenbauer_matrices(
    eval: &GegenbauerEvaluator,
    dataset: &Dataset,
    max_k: usize,
) -> Result<Vec<DMatrix<f64>>> {
    if max_k > eval.max_degree {
        return Err(Error::DegreeOutOfRange { degree: max_k, max: eval.max_degree });
    }
    if eval.domain != dataset.domain {
        return Err(Error::DimensionMismatch("evaluator and dataset domains differ".into()));
    }
    let n = dataset.n();
    let mut mats = vec![DMatrix::zeros(n, n); max_k + 1];
    if eval.domain.is_hypercube() {
        let masks = dataset.sign_masks()?;
        for i in 0..n {
            for j in i..n {
                let h = (masks[i] ^ masks[j]).count_ones() as usize;
                for (k, m) in mats.iter_mut().enumerate() {
                    let v = eval.at_atom(k, h);
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
        }
    } else {
        let g = gram(dataset);
        let d = eval.domain.d as f64;
        let mut buf = vec![0.0; eval.max_degree + 1];
        for i in 0..n {
            for j in i..n {
                let t = if i == j { d } else { g[(i, j)].clamp(-d, d) };
                eval.eval_into(t, &mut buf);
                for (k, m) in mats.iter_mut().enumerate() {
                    m[(i, j)] = buf[k];
                    m[(j, i)] = buf[k];
                }
            }
        }
    }
    Ok(mats)
}

/// `max_{k,l <= K} |B_k <Q_k, Q_l>_mu - delta_kl|` under the marginal measure.
pub fn orthonormality_defect(domain: Domain, max_k: usize, quadrature_order: usize) -> Result<f64> {
    let eval = GegenbauerEvaluator::new(domain, max_k)?;
    let measure = marginal_measure(domain, quadrature_order);
    let values: Vec<Vec<f64>> = measure
        .nodes
        .iter()
        .map(|t| {
            let mut v = vec![0.0; max_k + 1];
            eval.eval_into(*t, &mut v);
            v
        })
        .collect();
    let mut worst = 0.0_f64;
    for k in 0..=max_k {
        let bk = subspace_dim(domain, k)? as f64;
        for l in 0..=max_k {
            let ip: f64 = values
                .iter()
                .zip(&measure.weights)
                .map(|(v, w)| w * v[k] * v[l])
                .sum();
            let target = if k == l { 1.0 } else { 0.0 };
            worst = worst.max((bk * ip - target).abs());
        }
    }
    Ok(worst)
}

/// Monomial coefficients (ascending powers of `x`) of `Q_0(sqrt(d) x), .., Q_K(sqrt(d) x)`.
pub fn scaled_coefficients(domain: Domain, max_k: usize) -> Vec<Vec<f64>> {
    let d = domain.d as f64;
    let sd = d.sqrt();
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
    if max_k >= 1 {
        polys.push(vec![0.0, sd / d]);
    }
    for k in 1..max_k {
        let kf = k as f64;
        let (lead, prev, denom) = match domain.kind {
            DomainKind::Hypercube => (sd, kf, d - kf),
            DomainKind::Sphere => ((2.0 * kf + d - 2.0) / sd, kf, kf + d - 2.0),
        };
        let mut next = vec![0.0; k + 2];
        for (p, c) in polys[k].iter().enumerate() {
            next[p + 1] += lead * c / denom;
        }
        for (p, c) in polys[k - 1].iter().enumerate() {
            next[p] -= prev * c / denom;
        }
        polys.push(next);
    }
    polys
}

/// Monomial coefficients of the probabilists' Hermite polynomials `He_0..He_K`.
pub fn hermite_coefficients(max_k: usize) -> Vec<Vec<f64>> {
    let mut polys: Vec<Vec<f64>> = vec![vec![1.0]];
    if max_k >= 1 {
        polys.push(vec![0.0, 1.0]);
    }
    for k in 1..max_k {
        let mut next = vec![0.0; k + 2];
        for (p, c) in polys[k].iter().enumerate() {
            next[p + 1] += c;
        }
        for (p, c) in polys[k - 1].iter().enumerate() {
            next[p] -= k as f64 * c;
        }
        polys.push(next);
    }
    polys
}

/// Largest coefficient gap between `sqrt(B_k) Q_k(sqrt(d) x)` and `He_k(x) / sqrt(k!)`.
pub fn hermite_limit_defect(domain: Domain, k: usize) -> Result<f64> {
    if k > 6 {
        return Err(Error::DegreeOutOfRange { degree: k, max: 6 });
    }
    if domain.is_hypercube() && k > domain.d {
        return Err(Error::DegreeOutOfRange { degree: k, max: domain.d });
    }
    let gq = scaled_coefficients(domain, k);
    let he = hermite_coefficients(k);
    let bk = (subspace_dim(domain, k)? as f64).sqrt();
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    let norm = fact.sqrt();
    Ok(gq[k]
        .iter()
        .zip(&he[k])
        .map(|(a, b)| (bk * a - b / norm).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{sample_dataset, subsets_of_size, monomial};
    use crate::linalg::sym_eigenvalues;

    #[test]
    fn first_degree_is_linear() {
        for dom in [Domain::sphere(7).unwrap(), Domain::hypercube(7).unwrap()] {
            let ev = GegenbauerEvaluator::new(dom, 3).unwrap();
            for t in [-7.0, -2.5, 0.0, 1.0, 7.0] {
                assert!((ev.eval(t).unwrap()[1] - t / 7.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hypercube_second_degree() {
        let d = 2;
        let ev = GegenbauerEvaluator::new(Domain::hypercube(d).unwrap(), 2).unwrap();
        let vals: Vec<f64> = [-2.0, 0.0, 2.0].iter().map(|t| ev.eval(*t).unwrap()[2]).collect();
        assert_eq!(vals, vec![1.0, -1.0, 1.0]);
        let ev = GegenbauerEvaluator::new(Domain::hypercube(9).unwrap(), 2).unwrap();
        for t in [-9.0, -3.0, 0.5, 5.0] {
            let expected = (t * t - 9.0) / (9.0 * 8.0);
            assert!((ev.eval(t).unwrap()[2] - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn normalized_at_right_endpoint() {
        for dom in [Domain::sphere(5).unwrap(), Domain::sphere(40).unwrap(), Domain::hypercube(12).unwrap()] {
            let ev = GegenbauerEvaluator::new(dom, 8).unwrap();
            let v = ev.eval(dom.d as f64).unwrap();
            assert!(v.iter().all(|q| (q - 1.0).abs() < 1e-10));
        }
    }

    #[test]
    fn out_of_range_argument() {
        let ev = GegenbauerEvaluator::new(Domain::sphere(5).unwrap(), 2).unwrap();
        assert!(matches!(ev.eval(5.5), Err(Error::ArgumentOutOfRange { .. })));
    }

    #[test]
    fn krawtchouk_table_matches_recurrence() {
        let dom = Domain::hypercube(20).unwrap();
        let ev = GegenbauerEvaluator::new(dom, 20).unwrap();
        for j in 0..=20 {
            let t = 20.0 - 2.0 * j as f64;
            let rec = ev.eval_recurrence(t);
            for k in 0..=8 {
                assert!((rec[k] - ev.at_atom(k, j)).abs() < 1e-10, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn orthonormality() {
        assert!(orthonormality_defect(Domain::hypercube(10).unwrap(), 4, 0).unwrap() <= 1e-10);
        assert!(orthonormality_defect(Domain::sphere(20).unwrap(), 4, 200).unwrap() <= 1e-8);
        assert!(orthonormality_defect(Domain::sphere(9).unwrap(), 0, 200).unwrap() <= 1e-12);
    }

    #[test]
    fn sphere_orthonormality_stable_under_order_doubling() {
        let a = orthonormality_defect(Domain::sphere(20).unwrap(), 4, 200).unwrap();
        let b = orthonormality_defect(Domain::sphere(20).unwrap(), 4, 400).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn bounded_on_support() {
        for dom in [Domain::sphere(3).unwrap(), Domain::sphere(30).unwrap(), Domain::hypercube(16).unwrap()] {
            let ev = GegenbauerEvaluator::new(dom, 8).unwrap();
            let d = dom.d as f64;
            for i in 0..1000 {
                let t = -d + 2.0 * d * i as f64 / 999.0;
                let v = ev.eval(t).unwrap();
                if dom.is_hypercube() {
                    // between atoms the Krawtchouk interpolant may leave [-1, 1];
                    // the bound applies at the support points
                    continue;
                }
                assert!(v.iter().all(|q| q.abs() <= 1.0 + 1e-6), "{dom:?} t={t}");
            }
            if dom.is_hypercube() {
                for j in 0..=dom.d {
                    for k in 0..=8 {
                        assert!(ev.at_atom(k, j).abs() <= 1.0 + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn addition_formula_on_hypercube() {
        let d = 9;
        let dom = Domain::hypercube(d).unwrap();
        let ev = GegenbauerEvaluator::new(dom, 3).unwrap();
        let ds = sample_dataset(dom, 6, 11);
        let masks = ds.sign_masks().unwrap();
        let g = gram(&ds);
        for k in 0..=3 {
            let subsets = subsets_of_size(d, k);
            let bk = subsets.len() as f64;
            for a in 0..6 {
                for b in 0..6 {
                    let direct: f64 = subsets
                        .iter()
                        .map(|s| monomial(masks[a], *s) * monomial(masks[b], *s))
                        .sum::<f64>()
                        / bk;
                    let q = ev.eval(g[(a, b)]).unwrap()[k];
                    assert!((direct - q).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn matrices_have_unit_diagonal_and_are_psd() {
        for dom in [Domain::hypercube(10).unwrap(), Domain::sphere(8).unwrap()] {
            let ev = GegenbauerEvaluator::new(dom, 4).unwrap();
            let ds = sample_dataset(dom, 40, 5);
            let mats = gegenbauer_matrices(&ev, &ds, 4).unwrap();
            for (k, m) in mats.iter().enumerate() {
                for i in 0..40 {
                    assert!((m[(i, i)] - 1.0).abs() < 1e-10);
                }
                let min = sym_eigenvalues(m)[0];
                assert!(min >= -1e-8, "k={k} min={min}");
            }
            assert!(mats[0].iter().all(|v| *v == 1.0));
        }
    }

    #[test]
    fn parity_flip_identity() {
        // Q_{d-l}(<x,y>) = Y_[d](x) Q_l(<x,y>) Y_[d](y)
        let d = 10;
        let dom = Domain::hypercube(d).unwrap();
        let ev = GegenbauerEvaluator::new(dom, d).unwrap();
        let ds = sample_dataset(dom, 25, 3);
        let mats = gegenbauer_matrices(&ev, &ds, d).unwrap();
        let parity: Vec<f64> = ds.sign_masks().unwrap().iter().map(|m| monomial(*m, (1 << d) - 1)).collect();
        for l in 0..=3 {
            for i in 0..25 {
                for j in 0..25 {
                    let lhs = mats[d - l][(i, j)];
                    let rhs = parity[i] * mats[l][(i, j)] * parity[j];
                    assert!((lhs - rhs).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn hermite_limit() {
        let s = |d| Domain::sphere(d).unwrap();
        assert_eq!(hermite_limit_defect(s(10), 0).unwrap(), 0.0);
        assert!(hermite_limit_defect(s(10), 1).unwrap() < 1e-15);
        // closed form for k = 2 on the sphere: |sqrt((d+2)/(d-1)) - 1| / sqrt(2)
        let mut prev = f64::INFINITY;
        for d in [10usize, 100, 1000] {
            let got = hermite_limit_defect(s(d), 2).unwrap();
            let df = d as f64;
            let oracle = (((df + 2.0) / (df - 1.0)).sqrt() - 1.0).abs() / 2f64.sqrt();
            assert!((got - oracle).abs() < 1e-12, "d={d}");
            assert!(got < prev);
            prev = got;
        }
        for k in 3..=6 {
            let a = hermite_limit_defect(s(50), k).unwrap();
            let b = hermite_limit_defect(s(5000), k).unwrap();
            assert!(b < a, "k={k}");
        }
        let h = |d| Domain::hypercube(d).unwrap();
        assert!(hermite_limit_defect(h(60), 3).unwrap() < hermite_limit_defect(h(12), 3).unwrap());
    }
}
