//! Dense symmetric linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Running sum kept as an unevaluated pair `hi + lo` with error-free
/// transformations, good to roughly twice double precision. Used where
/// terms of size `1e16` cancel down to `O(1)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub fn add(&mut self, x: f64) {
        let s = self.hi + x;
        let bb = s - self.hi;
        let e = (self.hi - (s - bb)) + (x - bb) + self.lo;
        self.hi = s + e;
        self.lo = e - (self.hi - s);
    }

    /// Adds `a * b` without rounding the product.
    pub fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.add(p);
        self.add(a.mul_add(b, -p));
    }

    /// Adds `c * other`.
    pub fn add_scaled(&mut self, other: DoubleDouble, c: f64) {
        self.add_product(other.hi, c);
        self.add_product(other.lo, c);
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// Largest `|A_ij - A_ji|`.
pub fn max_asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

pub fn check_symmetric(a: &DMatrix<f64>, tol: f64) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let asym = max_asymmetry(a);
    let scale = a.amax().max(1.0);
    if asym > tol * scale {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Eigenvalues of a symmetric matrix, sorted ascending.
pub fn sym_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Operator norm of a symmetric matrix: the largest absolute eigenvalue.
pub fn sym_op_norm(a: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(a)
        .into_iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Solves `(A + shift I) x = b` by Cholesky and reports the relative residual
/// `||(A + shift I) x - b|| / ||b||` (zero when `b = 0`).
pub fn spd_solve(a: &DMatrix<f64>, shift: f64, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let n = a.nrows();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "rhs length {} vs matrix order {n}",
            b.len()
        )));
    }
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] += shift;
    }
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::SolverFailure("matrix is not positive definite".into()))?;
    let mut x = chol.solve(b);
    // one step of iterative refinement
    let r = b - &m * &x;
    x += chol.solve(&r);
    let bn = b.norm();
    let res = if bn > 0.0 { (&m * &x - b).norm() / bn } else { (&m * &x).norm() };
    Ok((x, res))
}

/// Explicit inverse of `A + shift I` for SPD `A`.
pub fn spd_inverse(a: &DMatrix<f64>, shift: f64) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] += shift;
    }
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::SolverFailure("matrix is not positive definite".into()))?;
    Ok(chol.inverse())
}

/// Residual of an eigenpair relative to `||A||` (Frobenius as a cheap upper
/// bound on the operator norm).
pub fn eigenpair_residual(a: &DMatrix<f64>, value: f64, vector: &DVector<f64>) -> f64 {
    let r = a * vector - vector * value;
    r.norm() / a.norm().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_survives_cancellation() {
        let mut acc = DoubleDouble::default();
        acc.add_product(1e8 + 1.0, 1e8 + 1.0);
        acc.add_product(-1e8, 1e8);
        acc.add(-2e8);
        assert_eq!(acc.value(), 1.0);
        let mut naive = 0.0;
        for _ in 0..1000 {
            acc.add(1e16);
            acc.add(0.25);
            acc.add(-1e16);
            naive += 1e16 + 0.25 - 1e16;
        }
        assert_eq!(acc.value(), 251.0);
        assert_ne!(naive, 250.0);
    }

    #[test]
    fn solve_small_system() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let (x, res) = spd_solve(&a, 0.0, &b).unwrap();
        assert!(res < 1e-14);
        assert!((x[0] - 0.2).abs() < 1e-14);
        assert!((x[1] - 0.6).abs() < 1e-14);
    }

    #[test]
    fn indefinite_is_refused() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        assert!(matches!(spd_solve(&a, 0.0, &b), Err(Error::SolverFailure(_))));
    }

    #[test]
    fn asymmetry_detected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        assert!(check_symmetric(&a, 1e-10).is_err());
    }
}
