use num_complex::Complex64;

use crate::linalg::{CMatrix, ZERO};

/// An LMI coefficient matrix, stored as triplets when it is sparse.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefMatrix {
    /// Every nonzero `(row, col, value)`, both triangles included.
    Sparse { dim: usize, entries: Vec<(u32, u32, Complex64)> },
    Dense(CMatrix),
}

impl CoefMatrix {
    pub fn zeros(dim: usize) -> Self {
        CoefMatrix::Sparse { dim, entries: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        CoefMatrix::Sparse {
            dim,
            entries: (0..dim as u32).map(|i| (i, i, Complex64::new(1.0, 0.0))).collect(),
        }
    }

    /// Picks the sparse form when at most a quarter of the entries are nonzero.
    pub fn from_dense(m: CMatrix) -> Self {
        let n = m.rows();
        let nnz = m.data().iter().filter(|z| **z != ZERO).count();
        if nnz * 4 > n * n {
            return CoefMatrix::Dense(m);
        }
        let mut entries = Vec::with_capacity(nnz);
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if v != ZERO {
                    entries.push((i as u32, j as u32, v));
                }
            }
        }
        CoefMatrix::Sparse { dim: n, entries }
    }

    /// Builds from triplets, summing duplicates.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        for (i, j, v) in triplets {
            m[(i, j)] += v;
        }
        Self::from_dense(m)
    }

    pub fn dim(&self) -> usize {
        match self {
            CoefMatrix::Sparse { dim, .. } => *dim,
            CoefMatrix::Dense(m) => m.rows(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            CoefMatrix::Sparse { entries, .. } => entries.len(),
            CoefMatrix::Dense(m) => m.data().iter().filter(|z| **z != ZERO).count(),
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match self {
            CoefMatrix::Dense(m) => m.clone(),
            CoefMatrix::Sparse { dim, entries } => {
                let mut m = CMatrix::zeros(*dim, *dim);
                for &(i, j, v) in entries {
                    m[(i as usize, j as usize)] += v;
                }
                m
            }
        }
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn entries(&self) -> Vec<(usize, usize, Complex64)> {
        match self {
            CoefMatrix::Sparse { entries, .. } => {
                entries.iter().map(|&(i, j, v)| (i as usize, j as usize, v)).collect()
            }
            CoefMatrix::Dense(m) => {
                let n = m.rows();
                let mut out = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if m[(i, j)] != ZERO {
                            out.push((i, j, m[(i, j)]));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.to_dense().hermitian_deviation()
    }

    /// `Re Tr[self · z]`
    pub fn trace_with(&self, z: &CMatrix) -> f64 {
        match self {
            CoefMatrix::Dense(m) => m.trace_product_re(z),
            CoefMatrix::Sparse { entries, .. } => entries
                .iter()
                .map(|&(i, j, v)| {
                    let w = z[(j as usize, i as usize)];
                    v.re * w.re - v.im * w.im
                })
                .sum(),
        }
    }

    /// `out += s · self`
    pub fn add_to(&self, out: &mut CMatrix, s: f64) {
        match self {
            CoefMatrix::Dense(m) => out.axpy_real(s, m),
            CoefMatrix::Sparse { entries, .. } => {
                for &(i, j, v) in entries {
                    out[(i as usize, j as usize)] += v * s;
                }
            }
        }
    }

    /// `a · self · a` for a Hermitian `a`.
    pub fn sandwich(&self, a: &CMatrix) -> CMatrix {
        let n = a.rows();
        match self {
            CoefMatrix::Sparse { entries, .. } if entries.len() < 2 * n => {
                // Σ v · a[:, i] a[j, :]
                let mut out = CMatrix::zeros(n, n);
                for &(i, j, v) in entries {
                    let (i, j) = (i as usize, j as usize);
                    let right = a.row(j).to_vec();
                    for r in 0..n {
                        let coef = a[(r, i)] * v;
                        if coef == ZERO {
                            continue;
                        }
                        for (o, b) in out.row_mut(r).iter_mut().zip(&right) {
                            *o += coef * b;
                        }
                    }
                }
                out
            }
            _ => a.matmul(&self.to_dense()).matmul(a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, r};

    fn herm() -> CMatrix {
        CMatrix::from_vec(3, 3, vec![r(1.0), c(0.0, 2.0), r(0.0), c(0.0, -2.0), r(0.0), r(0.0), r(0.0), r(0.0), r(-1.0)])
            .unwrap()
    }

    #[test]
    fn representation_choice() {
        assert!(matches!(CoefMatrix::from_dense(herm()), CoefMatrix::Dense(_)));
        let mut sparse = CMatrix::zeros(4, 4);
        sparse[(1, 2)] = r(1.0);
        sparse[(2, 1)] = r(1.0);
        let s = CoefMatrix::from_dense(sparse.clone());
        assert!(matches!(s, CoefMatrix::Sparse { .. }));
        assert_eq!(s.nnz(), 2);
        assert_eq!(s.to_dense(), sparse);
    }

    #[test]
    fn operations_agree_between_forms() {
        let a = CMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, i as f64 - j as f64)).hermitian_part();
        let z = CMatrix::from_fn(3, 3, |i, j| c((i * j) as f64 + 1.0, j as f64 - i as f64));
        let dense = CoefMatrix::Dense(herm());
        let sparse = CoefMatrix::Sparse {
            dim: 3,
            entries: herm().data().iter().enumerate().filter(|(_, v)| **v != ZERO).map(|(k, v)| ((k / 3) as u32, (k % 3) as u32, *v)).collect(),
        };
        assert!((dense.trace_with(&z) - sparse.trace_with(&z)).abs() < 1e-12);
        assert!((&dense.sandwich(&a) - &sparse.sandwich(&a)).max_abs() < 1e-12);
        assert!((&dense.sandwich(&a) - &a.matmul(&herm()).matmul(&a)).max_abs() < 1e-12);
        let mut x = CMatrix::identity(3);
        let mut y = CMatrix::identity(3);
        dense.add_to(&mut x, 0.5);
        sparse.add_to(&mut y, 0.5);
        assert_eq!(x, y);
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = CoefMatrix::from_triplets(2, [(0, 0, r(1.0)), (0, 0, r(2.0))]);
        assert_eq!(m.to_dense()[(0, 0)], r(3.0));
    }
}
