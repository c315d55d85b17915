use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{kron_vec, min_eigenvalue, partial_transpose, vec_norm, CMatrix, TensorStructure};

pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Bipartite density matrix on `H_A ⊗ H_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: CMatrix,
    ts: TensorStructure,
}

impl DensityMatrix {
    /// Admits `m` as a state: Hermitian to `1e-12`, unit trace to `1e-12`, and
    /// minimum eigenvalue at least `-1e-10`.
    pub fn new(m: CMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        Self::admit(m, d_a, d_b, TRACE_TOL, TRACE_TOL, POSITIVITY_TOL, false)
    }

    /// Looser admission for states read from decimal files. A trace further
    /// than `1e-12` from one is renormalised after the checks pass.
    pub fn with_tolerance(m: CMatrix, d_a: usize, d_b: usize, tol: f64) -> Result<Self> {
        Self::admit(m, d_a, d_b, tol, tol, tol, true)
    }

    fn admit(
        m: CMatrix,
        d_a: usize,
        d_b: usize,
        herm_tol: f64,
        trace_tol: f64,
        pos_tol: f64,
        renormalise: bool,
    ) -> Result<Self> {
        let ts = TensorStructure::bipartite(d_a, d_b)?;
        if !m.is_square() || m.rows() != d_a * d_b {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a {d_a}x{d_b} bipartite state",
                m.rows(),
                m.cols()
            )));
        }
        let dev = m.hermitian_deviation();
        if dev > herm_tol {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:e})")));
        }
        let mut op = m.hermitian_part();
        let tr = op.trace().re;
        if (tr - 1.0).abs() > trace_tol {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        if renormalise && (tr - 1.0).abs() > TRACE_TOL {
            op = op.scale_real(1.0 / tr);
        }
        let min = min_eigenvalue(&op)?;
        if min < -pos_tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { op, ts })
    }

    pub fn maximally_mixed(d_a: usize, d_b: usize) -> Self {
        let n = d_a * d_b;
        Self {
            op: CMatrix::identity(n).scale_real(1.0 / n as f64),
            ts: TensorStructure::bipartite(d_a, d_b).expect("dimensions >= 2"),
        }
    }

    /// Normalised projector onto a pure state vector.
    pub fn pure(psi: &[Complex64], d_a: usize, d_b: usize) -> Result<Self> {
        let norm = vec_norm(psi);
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(CMatrix::outer(&v, &v), d_a, d_b)
    }

    /// Pure product state `|x⟩⟨x| ⊗ |y⟩⟨y|` (inputs normalised).
    pub fn product(x: &[Complex64], y: &[Complex64]) -> Result<Self> {
        Self::pure(&kron_vec(x, y), x.len(), y.len())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.op
    }

    pub fn structure(&self) -> &TensorStructure {
        &self.ts
    }

    pub fn dim_a(&self) -> usize {
        self.ts.dims()[0]
    }

    pub fn dim_b(&self) -> usize {
        self.ts.dims()[1]
    }

    pub fn dim(&self) -> usize {
        self.op.rows()
    }

    pub fn partial_transpose_a(&self) -> CMatrix {
        partial_transpose(&self.op, &self.ts, &[0]).expect("structure matches by construction")
    }

    /// `(1-p)ρ + p·I/(d_A d_B)`
    pub fn mix_with_identity(&self, p: f64) -> Self {
        let n = self.dim() as f64;
        let mut op = self.op.scale_real(1.0 - p);
        op.add_identity(p / n);
        Self { op, ts: self.ts.clone() }
    }

    /// Conjugation by `U_A ⊗ U_B`.
    pub fn local_unitary(&self, ua: &CMatrix, ub: &CMatrix) -> Result<Self> {
        if ua.rows() != self.dim_a() || ub.rows() != self.dim_b() {
            return Err(Error::DimensionMismatch("local unitary dimensions".into()));
        }
        let u = ua.kron(ub);
        Ok(Self {
            op: u.congruence(&self.op).hermitian_part(),
            ts: self.ts.clone(),
        })
    }

    /// The same state with the roles of A and B exchanged.
    pub fn swap_parties(&self) -> Self {
        let (da, db) = (self.dim_a(), self.dim_b());
        let p = crate::linalg::factor_permutation(&[da, db], &[1, 0]).expect("valid permutation");
        Self {
            op: p.congruence(&self.op),
            ts: TensorStructure::bipartite(db, da).expect("dimensions >= 2"),
        }
    }
}

/// Unnormalised product vector `|x⟩ ⊗ |y⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
}

impl ProductVector {
    pub fn new(x: Vec<Complex64>, y: Vec<Complex64>) -> Result<Self> {
        if vec_norm(&x) == 0.0 || vec_norm(&y) == 0.0 {
            return Err(Error::InvalidArgument("product vector factors must be non-zero".into()));
        }
        Ok(Self { x, y })
    }

    pub fn basis(d_a: usize, i: usize, d_b: usize, j: usize) -> Self {
        let mut x = vec![Complex64::new(0.0, 0.0); d_a];
        let mut y = vec![Complex64::new(0.0, 0.0); d_b];
        x[i] = Complex64::new(1.0, 0.0);
        y[j] = Complex64::new(1.0, 0.0);
        Self { x, y }
    }

    pub fn joint(&self) -> Vec<Complex64> {
        kron_vec(&self.x, &self.y)
    }
}

/// The bihermitian form `E(x,y) = ⟨xy|W|xy⟩`.
pub fn product_state_value(w: &CMatrix, v: &ProductVector) -> Result<f64> {
    if w.rows() != v.x.len() * v.y.len() || !w.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} against a {}x{} product vector",
            w.rows(),
            v.x.len(),
            v.y.len()
        )));
    }
    Ok(w.expectation(&v.joint()).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, r};
    use proptest::prelude::*;

    #[test]
    fn admission_checks() {
        assert!(DensityMatrix::new(CMatrix::identity(4), 2, 2).is_err());
        assert!(DensityMatrix::new(CMatrix::from_real_diagonal(&[1.2, -0.2, 0.0, 0.0]), 2, 2).is_err());
        assert!(DensityMatrix::new(CMatrix::identity(4).scale_real(0.25), 2, 3).is_err());
        assert!(DensityMatrix::new(CMatrix::from_real_diagonal(&[1.0, -1e-11, 1e-11, 0.0]), 2, 2).is_ok());
    }

    #[test]
    fn identity_form_on_unit_vectors() {
        let v = ProductVector::new(vec![r(0.6), c(0.0, 0.8)], vec![r(1.0), r(0.0), r(0.0)]).unwrap();
        assert!((product_state_value(&CMatrix::identity(6), &v).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projector_overlap() {
        let mut w = CMatrix::zeros(9, 9);
        w[(2, 2)] = r(1.0); // |02⟩⟨02|
        let v = ProductVector::basis(3, 0, 3, 2);
        assert_eq!(product_state_value(&w, &v).unwrap(), 1.0);
    }

    #[test]
    fn zero_factor_rejected() {
        assert!(ProductVector::new(vec![r(0.0); 2], vec![r(1.0); 2]).is_err());
        let v = ProductVector::basis(2, 0, 2, 0);
        assert!(product_state_value(&CMatrix::identity(6), &v).is_err());
    }

    proptest! {
        #[test]
        fn form_is_phase_invariant(
            xs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3),
            ys in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2),
            ws in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36),
            pa in 0.0f64..6.3, pb in 0.0f64..6.3,
        ) {
            let x: Vec<_> = xs.iter().map(|&(a, b)| c(a, b)).collect();
            let y: Vec<_> = ys.iter().map(|&(a, b)| c(a, b)).collect();
            prop_assume!(vec_norm(&x) > 1e-3 && vec_norm(&y) > 1e-3);
            let w = CMatrix::from_vec(6, 6, ws.iter().map(|&(a, b)| c(a, b)).collect()).unwrap().hermitian_part();
            let base = product_state_value(&w, &ProductVector::new(x.clone(), y.clone()).unwrap()).unwrap();
            let ea = Complex64::from_polar(1.0, pa);
            let eb = Complex64::from_polar(1.0, pb);
            let x2: Vec<_> = x.iter().map(|z| z * ea).collect();
            let y2: Vec<_> = y.iter().map(|z| z * eb).collect();
            let rotated = product_state_value(&w, &ProductVector::new(x2, y2).unwrap()).unwrap();
            prop_assert!((base - rotated).abs() < 1e-13 * base.abs().max(1.0));
        }
    }
}
