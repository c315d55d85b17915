//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex64;

use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order and the matching unitary (columns are
/// eigenvectors).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.vectors.col_vec(i)
    }

    /// `V diag(f(λ)) V†`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for r in 0..n {
            for (c, &lam) in self.values.iter().enumerate() {
                scaled[(r, c)] *= f(lam);
            }
        }
        scaled.matmul_adjoint(&self.vectors)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be Hermitian to within `1e-12` (absolute, scaled up for
/// matrices with entries larger than one); the Hermitian part is what gets
/// diagonalised.
pub fn eig_hermitian(m: &CMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(jacobi(m.hermitian_part()))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.values.first().copied().unwrap_or(0.0))
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(mut a: CMatrix) -> EigenDecomposition {
    let n = a.rows();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();
    if n > 1 && scale > 0.0 {
        let target = OFF_DIAGONAL_TOL * scale;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) < target {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    EigenDecomposition { values, vectors }
}

/// Annihilates `a[p][q]` with the unitary `U = D·J`, where `D` rotates the
/// phase of column q so the pivot becomes real and `J` is a real Givens
/// rotation.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip pivots already negligible against both diagonal entries.
    if g < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / g;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;

    let u_pp = Complex64::new(cs, 0.0);
    let u_pq = Complex64::new(sn, 0.0);
    let u_qp = -phase.conj() * sn;
    let u_qq = phase.conj() * cs;

    let n = a.rows();
    // A <- A U (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    // A <- U† A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V <- V U
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{c, r};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        g.hermitian_part()
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let e = eig_hermitian(&CMatrix::from_real_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = eig_hermitian(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pauli_y_has_complex_eigenvectors() {
        let y = CMatrix::from_vec(2, 2, vec![ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]).unwrap();
        let e = eig_hermitian(&y).unwrap();
        let resid = &y.matmul(&e.vectors) - &e.vectors.matmul(&CMatrix::from_real_diagonal(&e.values));
        assert!(resid.max_abs() < 1e-14);
    }

    #[test]
    fn min_eigenvalue_examples() {
        assert_eq!(min_eigenvalue(&CMatrix::identity(4)).unwrap(), 1.0);
        assert_eq!(min_eigenvalue(&CMatrix::from_real_diagonal(&[-2.0, 5.0])).unwrap(), -2.0);
    }

    #[test]
    fn random_reconstruction() {
        for (n, seed) in [(16, 1), (27, 2), (5, 3)] {
            let m = random_hermitian(n, seed);
            let e = eig_hermitian(&m).unwrap();
            let norm = m.frobenius_norm();
            let back = e.reconstruct_with(|x| x);
            assert!((&back - &m).frobenius_norm() < 1e-10 * norm);
            let resid = &m.matmul(&e.vectors) - &e.vectors.matmul(&CMatrix::from_real_diagonal(&e.values));
            assert!(resid.frobenius_norm() <= 1e-10 * norm);
            let gram = e.vectors.adjoint_matmul(&e.vectors);
            assert!((&gram - &CMatrix::identity(n)).max_abs() < 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            let tr = m.trace().re;
            let sum: f64 = e.values.iter().sum();
            assert!((sum - tr).abs() <= 1e-10 * tr.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn degenerate_and_zero_inputs() {
        let z = CMatrix::zeros(3, 3);
        assert_eq!(eig_hermitian(&z).unwrap().values, vec![0.0; 3]);
        let e = eig_hermitian(&CMatrix::identity(3).scale(r(2.0))).unwrap();
        assert_eq!(e.values, vec![2.0; 3]);
    }
}
