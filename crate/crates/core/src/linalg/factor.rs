//! Cholesky factorisations and triangular solves.

use num_complex::Complex64;

use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

/// Lower-triangular `L` with `L L† = a` for Hermitian positive definite `a`.
pub fn cholesky(a: &CMatrix) -> Result<CMatrix> {
    let n = a.rows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse(l: &CMatrix) -> CMatrix {
    let n = l.rows();
    let mut inv = CMatrix::zeros(n, n);
    for col in 0..n {
        for i in col..n {
            let mut s = if i == col { Complex64::new(1.0, 0.0) } else { ZERO };
            for k in col..i {
                s -= l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = s / l[(i, i)];
        }
    }
    inv
}

/// Dense real symmetric positive definite factorisation, row-major `n×n`.
#[derive(Debug, Clone)]
pub struct RealCholesky {
    n: usize,
    l: Vec<f64>,
}

impl RealCholesky {
    pub fn factor(a: &[f64], n: usize) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            let ljj = d.sqrt();
            l[j * n + j] = ljj;
            for i in j + 1..n {
                let mut s = a[i * n + j];
                let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
                for (x, y) in ri.iter().zip(rj) {
                    s -= x * y;
                }
                l[i * n + j] = s / ljj;
            }
        }
        Ok(Self { n, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}
