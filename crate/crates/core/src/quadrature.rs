//! Gauss rules for the symmetric Jacobi weight `(1 - s^2)^alpha` on `[-1, 1]`.

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes ascending, weights normalized to sum to one.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Golub-Welsch on the Jacobi matrix of the ultraspherical family with
/// parameter `alpha + 1/2`. Exact for polynomials of degree `2 * order - 1`.
pub fn gauss_symmetric_jacobi(order: usize, alpha: f64) -> GaussRule {
    assert!(alpha > -1.0, "weight exponent must exceed -1");
    let lambda = alpha + 0.5;
    let mut jac = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let kf = k as f64;
        // monic recurrence coefficient beta_k
        let beta = kf * (kf + 2.0 * lambda - 1.0) / (4.0 * (kf + lambda) * (kf + lambda - 1.0));
        let off = beta.sqrt();
        jac[(k, k - 1)] = off;
        jac[(k - 1, k)] = off;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // the rule is symmetric; enforce it exactly
    let n = pairs.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-x, w);
        pairs[j] = (x, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1 / total).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_moments() {
        let rule = gauss_symmetric_jacobi(10, 0.0);
        // E[s^2] = 1/3, E[s^4] = 1/5 for the uniform law on [-1, 1]
        let m2: f64 = rule.nodes.iter().zip(&rule.weights).map(|(s, w)| w * s * s).sum();
        let m4: f64 = rule.nodes.iter().zip(&rule.weights).map(|(s, w)| w * s.powi(4)).sum();
        assert!((m2 - 1.0 / 3.0).abs() < 1e-14);
        assert!((m4 - 0.2).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_second_kind_second_moment() {
        // alpha = 1/2: E[s^2] = 1/(2 alpha + 3) = 1/4
        let rule = gauss_symmetric_jacobi(7, 0.5);
        let m2: f64 = rule.nodes.iter().zip(&rule.weights).map(|(s, w)| w * s * s).sum();
        assert!((m2 - 0.25).abs() < 1e-14);
    }
}
