//! Hermitian operator bases built from generalised Gell-Mann matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, r, CMatrix};

use super::DensityMatrix;

/// Basis `σ_1 … σ_{d²}` of Hermitian operators on a `d`-dimensional space with
/// `Tr(σ_i σ_j) = alpha·δ_ij` and `Tr σ_i = δ_i1`.
///
/// `σ_1 = I/d`, followed by the symmetric off-diagonal generators, the
/// antisymmetric ones, and the diagonal ones, each family in lexicographic
/// order. All elements are scaled so `alpha = 1/d`.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<CMatrix>,
    alpha: f64,
}

impl OperatorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &CMatrix {
        &self.elements[i]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

pub fn build_basis(d: usize) -> Result<OperatorBasis> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("basis dimension must be >= 2, got {d}")));
    }
    let alpha = 1.0 / d as f64;
    // Standard Gell-Mann generators have Tr(λ²) = 2.
    let s = (alpha / 2.0).sqrt();
    let mut elements = Vec::with_capacity(d * d);
    elements.push(CMatrix::identity(d).scale_real(alpha));

    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = r(s);
            m[(k, j)] = r(s);
            elements.push(m);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = c(0.0, -s);
            m[(k, j)] = c(0.0, s);
            elements.push(m);
        }
    }
    for l in 1..d {
        let norm = s * (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = r(norm);
        }
        m[(l, l)] = r(-(l as f64) * norm);
        elements.push(m);
    }
    Ok(OperatorBasis { dim: d, elements, alpha })
}

/// Coefficients `ρ_ij` of `ρ = Σ ρ_ij σ_i^A ⊗ σ_j^B`, indexed `[i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub n_a: usize,
    pub n_b: usize,
    pub values: Vec<f64>,
}

impl Coefficients {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_b + j]
    }
}

/// `ρ_ij = (α_A α_B)⁻¹ Tr[ρ σ_i^A ⊗ σ_j^B]`
pub fn expand(rho: &DensityMatrix, ba: &OperatorBasis, bb: &OperatorBasis) -> Result<Coefficients> {
    expand_operator(rho.matrix(), ba, bb)
}

/// Same as [`expand`] for an arbitrary Hermitian operator on `H_A ⊗ H_B`.
pub fn expand_operator(m: &CMatrix, ba: &OperatorBasis, bb: &OperatorBasis) -> Result<Coefficients> {
    let (da, db) = (ba.dim(), bb.dim());
    if !m.is_square() || m.rows() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {} against bases of dimension {da}x{db}",
            m.rows()
        )));
    }
    let norm = 1.0 / (ba.alpha() * bb.alpha());
    let mut values = Vec::with_capacity(ba.len() * bb.len());
    for sa in ba.elements() {
        for sb in bb.elements() {
            // Tr[m (sa ⊗ sb)] without building the Kronecker product.
            let mut acc = Complex64::new(0.0, 0.0);
            for (ia, ja, va) in nonzeros(sa) {
                for (ib, jb, vb) in nonzeros(sb) {
                    acc += m[(ja * db + jb, ia * db + ib)] * va * vb;
                }
            }
            values.push(acc.re * norm);
        }
    }
    Ok(Coefficients { n_a: ba.len(), n_b: bb.len(), values })
}

pub fn reconstruct(coeffs: &Coefficients, ba: &OperatorBasis, bb: &OperatorBasis) -> CMatrix {
    let n = ba.dim() * bb.dim();
    let mut out = CMatrix::zeros(n, n);
    for (i, sa) in ba.elements().iter().enumerate() {
        for (j, sb) in bb.elements().iter().enumerate() {
            let v = coeffs.get(i, j);
            if v != 0.0 {
                out.axpy_real(v, &sa.kron(sb));
            }
        }
    }
    out
}

pub(crate) fn nonzeros(m: &CMatrix) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m[(i, j)];
            if v.re != 0.0 || v.im != 0.0 {
                out.push((i, j, v));
            }
        }
    }
    out
}
