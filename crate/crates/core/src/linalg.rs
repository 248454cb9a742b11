//! Minimal dense linear algebra: LU with partial pivoting for the kriging
//! saddle-point system, Cholesky for simulating correlated Gaussian fields.
//! Matrices are row-major `Vec<f64>`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    Singular,
    NotPositiveDefinite,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::Singular => write!(f, "matrix is singular to working precision"),
            LinalgError::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// LU factorization with partial pivoting, PA = LU.
pub struct LuFactor {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactor {
    pub fn new(mut a: Vec<f64>, n: usize) -> Result<Self, LinalgError> {
        assert_eq!(a.len(), n * n, "matrix buffer length must be n*n");
        let scale = a.iter().fold(0.0f64, |m, &v| m.max(math::abs(v)));
        let tol = f64::EPSILON * scale * n as f64;
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_val = math::abs(a[col * n + col]);
            for row in (col + 1)..n {
                let v = math::abs(a[row * n + col]);
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = row;
                }
            }
            if pivot_val <= tol {
                return Err(LinalgError::Singular);
            }
            if pivot_row != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot_row * n + k);
                }
                perm.swap(col, pivot_row);
            }
            let inv_p = 1.0 / a[col * n + col];
            for row in (col + 1)..n {
                let factor = a[row * n + col] * inv_p;
                a[row * n + col] = factor;
                for k in (col + 1)..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
        Ok(LuFactor { n, lu: a, perm })
    }

    /// Solves Ax = b for one right-hand side.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // Forward substitution with unit lower triangle.
        for i in 1..n {
            let mut acc = x[i];
            for k in 0..i {
                acc -= self.lu[i * n + k] * x[k];
            }
            x[i] = acc;
        }
        // Back substitution.
        for i in (0..n).rev() {
            let mut acc = x[i];
            for k in (i + 1)..n {
                acc -= self.lu[i * n + k] * x[k];
            }
            x[i] = acc / self.lu[i * n + i];
        }
        x
    }
}

/// Lower-triangular Cholesky factor L with A = L Lᵀ, row-major.
pub fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>, LinalgError> {
    assert_eq!(a.len(), n * n, "matrix buffer length must be n*n");
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut acc = a[i * n + j];
            for k in 0..j {
                acc -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if acc <= 0.0 {
                    return Err(LinalgError::NotPositiveDefinite);
                }
                l[i * n + j] = math::sqrt(acc);
            } else {
                l[i * n + j] = acc / l[j * n + j];
            }
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        // [[2,1],[1,3]] x = [3,5] -> x = [0.8, 1.4]
        let f = LuFactor::new(vec![2.0, 1.0, 1.0, 3.0], 2).unwrap();
        let x = f.solve(&[3.0, 5.0]);
        assert!((x[0] - 0.8).abs() < 1e-12);
        assert!((x[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn lu_requires_pivoting() {
        // Zero leading pivot but nonsingular.
        let f = LuFactor::new(vec![0.0, 1.0, 1.0, 0.0], 2).unwrap();
        let x = f.solve(&[2.0, 3.0]);
        assert!((x[0] - 3.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lu_detects_singular() {
        assert!(matches!(
            LuFactor::new(vec![1.0, 2.0, 2.0, 4.0], 2),
            Err(LinalgError::Singular)
        ));
    }

    #[test]
    fn cholesky_round_trip() {
        let a = vec![4.0, 2.0, 0.6, 2.0, 5.0, 1.1, 0.6, 1.1, 3.0];
        let l = cholesky(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..3 {
                    acc += l[i * 3 + k] * l[j * 3 + k];
                }
                assert!((acc - a[i * 3 + j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = vec![1.0, 2.0, 2.0, 1.0];
        assert!(matches!(cholesky(&a, 2), Err(LinalgError::NotPositiveDefinite)));
    }
}
