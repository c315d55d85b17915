//! Dense complex linear algebra for Hermitian operators on tensor-product
//! spaces.

mod eigen;
mod factor;
mod matrix;
mod tensor;

pub use eigen::{eig_hermitian, min_eigenvalue, EigenDecomposition};
pub use factor::{cholesky, lower_inverse, RealCholesky};
pub use matrix::{c, inner, kron_vec, r, vec_norm, CMatrix, ONE, ZERO};
pub use tensor::{factor_permutation, partial_trace, partial_transpose, Party, TensorStructure};

use crate::error::{Error, Result};

/// Kronecker product of two matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kron(b)
}

/// A matrix known to be Hermitian. Construction symmetrises `(m + m†)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    /// Symmetrises `m`, rejecting inputs further than `tol` from Hermitian.
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator is not square",
                m.rows(),
                m.cols()
            )));
        }
        let dev = m.hermitian_deviation();
        if dev > tol {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Symmetrises unconditionally.
    pub fn symmetrized(m: &CMatrix) -> Self {
        Self(m.hermitian_part())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0).expect("Hermitian by construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
            .prop_map(move |v| CMatrix::from_vec(n, n, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn partial_transpose_is_involutive_and_trace_preserving(m in arb_matrix(12), mask in 0u8..8) {
            let ts = TensorStructure::new(vec![2, 3, 2], vec![Party::A, Party::B, Party::A]).unwrap();
            let set: Vec<usize> = (0..3).filter(|i| mask & (1 << i) != 0).collect();
            let once = partial_transpose(&m, &ts, &set).unwrap();
            let twice = partial_transpose(&once, &ts, &set).unwrap();
            prop_assert_eq!(&twice, &m);
            prop_assert!((once.trace() - m.trace()).norm() < 1e-13);
        }

        #[test]
        fn partial_transpose_preserves_hermiticity(m in arb_matrix(6)) {
            let h = m.hermitian_part();
            let ts = TensorStructure::bipartite(2, 3).unwrap();
            let pt = partial_transpose(&h, &ts, &[1]).unwrap();
            prop_assert!(pt.hermitian_deviation() < 1e-15);
        }

        #[test]
        fn trace_commutes_with_transpose_of_other_factors(m in arb_matrix(8), which in 0usize..2) {
            let ts = TensorStructure::extension(2, 2, 2, 1).unwrap();
            let reduced = TensorStructure::bipartite(2, 2).unwrap();
            let lhs = partial_transpose(&partial_trace(&m, &ts, &[0, 1]).unwrap(), &reduced, &[which]).unwrap();
            let rhs = partial_trace(&partial_transpose(&m, &ts, &[which]).unwrap(), &ts, &[0, 1]).unwrap();
            prop_assert!((&lhs - &rhs).max_abs() < 1e-13);
        }

        #[test]
        fn kron_is_associative(a in arb_matrix(2), b in arb_matrix(3), cm in arb_matrix(2)) {
            let left = kron(&kron(&a, &b), &cm);
            let right = kron(&a, &kron(&b, &cm));
            // Same index arithmetic; only the product rounding may differ.
            prop_assert!((&left - &right).max_abs() < 1e-15);
        }

        #[test]
        fn eigenvalues_sum_to_trace(m in arb_matrix(7)) {
            let h = m.hermitian_part();
            let e = eig_hermitian(&h).unwrap();
            let tr = h.trace().re;
            let s: f64 = e.values.iter().sum();
            prop_assert!((s - tr).abs() <= 1e-10 * tr.abs().max(1.0));
        }
    }

    #[test]
    fn hermitian_operator_symmetrises() {
        let m = CMatrix::from_vec(2, 2, vec![r(1.0), c(0.5, 1e-14), c(0.5, 0.0), r(2.0)]).unwrap();
        let h = HermitianOperator::new(m.clone(), 1e-12).unwrap();
        assert_eq!(h.matrix().hermitian_deviation(), 0.0);
        assert!(HermitianOperator::new(m, 1e-16).is_err());
    }
}
