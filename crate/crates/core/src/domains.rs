//! Data domains: the sphere of radius `sqrt(d)` and the hypercube `{-1, +1}^d`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::seed::rng_from_seed;

/// Largest supported hypercube dimension; points are also packed as `u64`
/// sign masks.
pub const MAX_HYPERCUBE_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Sphere,
    Hypercube,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
    pub d: usize,
}

impl Domain {
    pub fn new(kind: DomainKind, d: usize) -> Result<Self> {
        match kind {
            DomainKind::Sphere if d < 3 => Err(Error::InvalidDomain(format!(
                "sphere requires d >= 3, got {d}"
            ))),
            DomainKind::Hypercube if d == 0 || d > MAX_HYPERCUBE_DIM => Err(Error::InvalidDomain(
                format!("hypercube requires 1 <= d <= {MAX_HYPERCUBE_DIM}, got {d}"),
            )),
            _ => Ok(Self { kind, d }),
        }
    }

    pub fn sphere(d: usize) -> Result<Self> {
        Self::new(DomainKind::Sphere, d)
    }

    pub fn hypercube(d: usize) -> Result<Self> {
        Self::new(DomainKind::Hypercube, d)
    }

    pub fn is_hypercube(&self) -> bool {
        self.kind == DomainKind::Hypercube
    }

    /// Dimension `B(A_d, k)` of the degree-`k` eigenspace.
    pub fn subspace_dim(&self, k: usize) -> Result<u128> {
        subspace_dim(*self, k)
    }

    /// `sum_{j <= k} B(A_d, j)`.
    pub fn cumulative_dim(&self, k: usize) -> Result<u128> {
        (0..=k).map(|j| subspace_dim(*self, j)).sum()
    }
}

/// Exact binomial coefficient; panics only on `u128` overflow, which cannot
/// happen for the `n <= 128` arguments used here.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn subspace_dim(domain: Domain, k: usize) -> Result<u128> {
    let d = domain.d as u64;
    let k64 = k as u64;
    match domain.kind {
        DomainKind::Hypercube => {
            if k > domain.d {
                return Err(Error::DegreeOutOfRange { degree: k, max: domain.d });
            }
            Ok(binomial(d, k64))
        }
        DomainKind::Sphere => {
            if k == 0 {
                return Ok(1);
            }
            let num = (2 * k64 + d - 2) as u128 * binomial(k64 + d - 3, k64);
            Ok(num / (d - 2) as u128)
        }
    }
}

/// `n` i.i.d. uniform points of a domain, stored row-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub domain: Domain,
    pub seed: u64,
    pub points: DMatrix<f64>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn d(&self) -> usize {
        self.domain.d
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.points.row(i).iter().copied().collect()
    }

    /// Hypercube rows packed as masks of their negative coordinates.
    pub fn sign_masks(&self) -> Result<Vec<u64>> {
        if !self.domain.is_hypercube() {
            return Err(Error::Unsupported("sign masks exist only on the hypercube".into()));
        }
        Ok((0..self.n())
            .map(|i| points_to_mask(self.points.row(i).iter().copied()))
            .collect())
    }

    /// Builds a dataset from explicit rows, validating the domain constraint.
    pub fn from_rows(domain: Domain, rows: &[Vec<f64>]) -> Result<Self> {
        let d = domain.d;
        let mut points = DMatrix::zeros(rows.len(), d);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::DimensionMismatch(format!("row {i} has length {}", r.len())));
            }
            check_point(domain, r)?;
            for (j, v) in r.iter().enumerate() {
                points[(i, j)] = *v;
            }
        }
        Ok(Self { domain, seed: 0, points })
    }
}

pub(crate) fn points_to_mask(row: impl Iterator<Item = f64>) -> u64 {
    row.enumerate()
        .fold(0u64, |m, (j, v)| if v < 0.0 { m | (1u64 << j) } else { m })
}

/// Validates that a point lies on the domain.
pub fn check_point(domain: Domain, x: &[f64]) -> Result<()> {
    if x.len() != domain.d {
        return Err(Error::DimensionMismatch(format!(
            "point of length {} on domain of dimension {}",
            x.len(),
            domain.d
        )));
    }
    match domain.kind {
        DomainKind::Hypercube => {
            if x.iter().any(|v| *v != 1.0 && *v != -1.0) {
                return Err(Error::InvalidDomain("hypercube entries must be +-1".into()));
            }
        }
        DomainKind::Sphere => {
            let sq: f64 = x.iter().map(|v| v * v).sum();
            let d = domain.d as f64;
            if ((sq - d) / d).abs() > 1e-9 {
                return Err(Error::InvalidDomain(format!("squared norm {sq} != {d}")));
            }
        }
    }
    Ok(())
}

/// Draws `n` uniform points. Sphere points are normalized standard Gaussian
/// vectors; hypercube points are independent fair signs.
pub fn sample_dataset(domain: Domain, n: usize, seed: u64) -> Dataset {
    let d = domain.d;
    let mut rng = rng_from_seed(seed);
    let mut points = DMatrix::zeros(n, d);
    match domain.kind {
        DomainKind::Hypercube => {
            for i in 0..n {
                for j in 0..d {
                    points[(i, j)] = if rng.random::<bool>() { 1.0 } else { -1.0 };
                }
            }
        }
        DomainKind::Sphere => {
            let mut buf = vec![0.0; d];
            for i in 0..n {
                fill_sphere_point(&mut rng, &mut buf);
                for j in 0..d {
                    points[(i, j)] = buf[j];
                }
            }
        }
    }
    Dataset { domain, seed, points }
}

pub(crate) fn fill_sphere_point<R: Rng>(rng: &mut R, out: &mut [f64]) {
    let d = out.len();
    loop {
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            let scale = (d as f64).sqrt() / norm;
            out.iter_mut().for_each(|v| *v *= scale);
            return;
        }
    }
}

/// `T_ij = <x_i, x_j>`.
pub fn gram(dataset: &Dataset) -> DMatrix<f64> {
    let x = &dataset.points;
    let mut g = x * x.transpose();
    // exact symmetry
    let n = g.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = g[(i, j)];
            g[(j, i)] = v;
        }
    }
    g
}

/// Hamming-distance matrix of a hypercube dataset: `<x_i, x_j> = d - 2 J_ij`.
pub fn hamming_matrix(dataset: &Dataset) -> Result<Vec<Vec<u32>>> {
    let masks = dataset.sign_masks()?;
    Ok(masks
        .iter()
        .map(|a| masks.iter().map(|b| (a ^ b).count_ones()).collect())
        .collect())
}

/// Law of `<1, x>` for uniform `x` (equivalently `sqrt(d) <x, e_1>` on the
/// sphere), as nodes on `[-d, d]` with probability weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalMeasure {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exact: bool,
}

impl MarginalMeasure {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| w * f(*t)).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Hypercube: the `d + 1` atoms `t = d - 2j` with binomial weights.
/// Sphere: a Gauss rule with `quadrature_order` nodes for the density
/// proportional to `(1 - (t/d)^2)^((d-3)/2)`.
pub fn marginal_measure(domain: Domain, quadrature_order: usize) -> MarginalMeasure {
    let d = domain.d;
    match domain.kind {
        DomainKind::Hypercube => {
            let scale = 0.5_f64.powi(d as i32);
            let nodes = (0..=d).map(|j| (d as f64) - 2.0 * j as f64).collect();
            let weights = (0..=d)
                .map(|j| binomial(d as u64, j as u64) as f64 * scale)
                .collect();
            MarginalMeasure { nodes, weights, exact: true }
        }
        DomainKind::Sphere => {
            let alpha = (d as f64 - 3.0) / 2.0;
            let rule = quadrature::gauss_symmetric_jacobi(quadrature_order.max(1), alpha);
            let nodes = rule.nodes.iter().map(|s| s * d as f64).collect();
            MarginalMeasure { nodes, weights: rule.weights, exact: false }
        }
    }
}

/// All subsets of `{0, .., d-1}` of size `k`, as bit masks in lexicographic order of their index lists.
pub fn subsets_of_size(d: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if k > d {
        return out;
    }
    if k == 0 {
        out.push(0);
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().fold(0u64, |m, &i| m | (1u64 << i)));
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + d - k {
                break;
            }
            if i == 0 && idx[0] == d - k {
                return out;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Fourier monomial `Y_S(x) = prod_{i in S} x_i` for a point given by its sign mask.
#[inline]
pub fn monomial(sign_mask: u64, subset: u64) -> f64 {
    if (sign_mask & subset).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
