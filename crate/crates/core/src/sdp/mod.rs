//! Block-structured semidefinite programs in inequality form:
//!
//! ```text
//! minimize cᵀx   subject to   F(x) = F₀ + Σ xᵢ Fᵢ ⪰ 0   (block by block)
//! maximize −Tr[F₀Z]   subject to   Tr[Fᵢ Z] = cᵢ, Z ⪰ 0
//! ```

mod certificate;
mod coef;
mod dump;
mod solver;

pub use certificate::{check_dual_certificate, CertificateReport, CERT_CONSTRAINT_TOL, CERT_NEGATIVITY_TOL, CERT_PSD_TOL};
pub use coef::CoefMatrix;
pub use dump::{read_dump, write_dump};
pub use solver::{solve, solve_with, IterationRecord, Residuals, SdpSolution, SolveStatus, SolverSettings};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub const MAX_BLOCK_DIM: usize = 512;
pub const MAX_VARIABLES: usize = 20_000;
const HERMITIAN_TOL: f64 = 1e-12;

/// One diagonal block of the LMI: `F₀` and the `m` coefficient matrices.
#[derive(Debug, Clone)]
pub struct SdpBlock {
    pub f0: CMatrix,
    pub f: Vec<CoefMatrix>,
}

impl SdpBlock {
    pub fn new(f0: CMatrix, f: Vec<CoefMatrix>) -> Self {
        Self { f0, f }
    }

    pub fn dim(&self) -> usize {
        self.f0.rows()
    }

    /// `F₀ + Σ xᵢ Fᵢ`
    pub fn evaluate(&self, x: &[f64]) -> CMatrix {
        let mut out = self.f0.clone();
        for (fi, &xi) in self.f.iter().zip(x) {
            if xi != 0.0 {
                fi.add_to(&mut out, xi);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    c: Vec<f64>,
    blocks: Vec<SdpBlock>,
}

impl SdpProblem {
    /// Validates shapes, Hermiticity to `1e-12` and the size limits.
    pub fn new(c: Vec<f64>, blocks: Vec<SdpBlock>) -> Result<Self> {
        let m = c.len();
        if m > MAX_VARIABLES {
            return Err(Error::Sizing(format!("{m} variables exceeds the limit of {MAX_VARIABLES}")));
        }
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("an SDP needs at least one block".into()));
        }
        for (b, block) in blocks.iter().enumerate() {
            let n = block.dim();
            if n > MAX_BLOCK_DIM {
                return Err(Error::Sizing(format!("block {b} has dimension {n}, limit is {MAX_BLOCK_DIM}")));
            }
            if !block.f0.is_square() || n == 0 {
                return Err(Error::DimensionMismatch(format!("block {b}: F0 must be square and non-empty")));
            }
            if block.f.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "block {b} has {} coefficient matrices, expected {m}",
                    block.f.len()
                )));
            }
            let dev = block.f0.hermitian_deviation();
            if dev > HERMITIAN_TOL {
                return Err(Error::NotHermitian { deviation: dev });
            }
            for fi in &block.f {
                if fi.dim() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "block {b}: coefficient of dimension {} in a block of dimension {n}",
                        fi.dim()
                    )));
                }
                let dev = fi.hermitian_deviation();
                if dev > HERMITIAN_TOL {
                    return Err(Error::NotHermitian { deviation: dev });
                }
            }
        }
        Ok(Self { c, blocks })
    }

    pub fn m(&self) -> usize {
        self.c.len()
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn blocks(&self) -> &[SdpBlock] {
        &self.blocks
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(SdpBlock::dim).collect()
    }

    /// `Tr[Fᵢ Z]` for every `i`, summed over blocks.
    pub fn constraint_values(&self, z: &[CMatrix]) -> Vec<f64> {
        (0..self.m())
            .map(|i| self.blocks.iter().zip(z).map(|(b, zb)| b.f[i].trace_with(zb)).sum())
            .collect()
    }

    /// `Tr[F₀ Z]` summed over blocks.
    pub fn f0_value(&self, z: &[CMatrix]) -> f64 {
        self.blocks.iter().zip(z).map(|(b, zb)| b.f0.trace_product_re(zb)).sum()
    }

    /// Same problem with its blocks reordered; `order[k]` is the source index
    /// of the k-th block.
    pub fn permute_blocks(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.blocks.len()];
        if order.len() != seen.len() || order.iter().any(|&o| o >= seen.len() || std::mem::replace(&mut seen[o], true)) {
            return Err(Error::InvalidArgument(format!("{order:?} is not a block permutation")));
        }
        Ok(Self { c: self.c.clone(), blocks: order.iter().map(|&o| self.blocks[o].clone()).collect() })
    }
}

/// Turns a feasibility problem (`c = 0`) into `minimize t` subject to
/// `F(x) + t·I ⪰ 0`, which always has a strictly feasible point.
pub fn min_t_augment(p: &SdpProblem) -> Result<SdpProblem> {
    if p.c.iter().any(|&ci| ci != 0.0) {
        return Err(Error::InvalidArgument("min-t augmentation expects a feasibility problem (c = 0)".into()));
    }
    let mut c = vec![0.0; p.m() + 1];
    c[p.m()] = 1.0;
    let blocks = p
        .blocks
        .iter()
        .map(|b| {
            let mut f = b.f.clone();
            f.push(CoefMatrix::identity(b.dim()));
            SdpBlock::new(b.f0.clone(), f)
        })
        .collect();
    SdpProblem::new(c, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::r;

    fn diag_block(f0: &[f64], f: Vec<CoefMatrix>) -> SdpBlock {
        SdpBlock::new(CMatrix::from_real_diagonal(f0), f)
    }

    #[test]
    fn validation() {
        let ok = SdpProblem::new(vec![1.0], vec![diag_block(&[1.0, 2.0], vec![CoefMatrix::identity(2)])]);
        assert!(ok.is_ok());
        let wrong_count = SdpProblem::new(vec![1.0, 0.0], vec![diag_block(&[1.0], vec![CoefMatrix::identity(1)])]);
        assert!(matches!(wrong_count, Err(Error::DimensionMismatch(_))));
        let wrong_dim = SdpProblem::new(vec![1.0], vec![diag_block(&[1.0, 2.0], vec![CoefMatrix::identity(3)])]);
        assert!(wrong_dim.is_err());
        let mut nh = CMatrix::zeros(2, 2);
        nh[(0, 1)] = r(1.0);
        let not_herm = SdpProblem::new(vec![1.0], vec![diag_block(&[1.0, 2.0], vec![CoefMatrix::from_dense(nh)])]);
        assert!(matches!(not_herm, Err(Error::NotHermitian { .. })));
        let huge = SdpProblem::new(vec![], vec![SdpBlock::new(CMatrix::identity(513), vec![])]);
        assert!(matches!(huge, Err(Error::Sizing(_))));
    }

    #[test]
    fn augmentation_appends_identity() {
        let p = SdpProblem::new(vec![0.0], vec![diag_block(&[1.0, -1.0], vec![CoefMatrix::identity(2)])]).unwrap();
        let a = min_t_augment(&p).unwrap();
        assert_eq!(a.c(), &[0.0, 1.0]);
        assert_eq!(a.blocks()[0].f[1].to_dense(), CMatrix::identity(2));
        let with_cost = SdpProblem::new(vec![1.0], vec![diag_block(&[1.0], vec![CoefMatrix::identity(1)])]).unwrap();
        assert!(min_t_augment(&with_cost).is_err());
    }

    #[test]
    fn evaluate_and_traces() {
        let b = diag_block(&[1.0, 2.0], vec![CoefMatrix::from_dense(CMatrix::from_real_diagonal(&[1.0, -1.0]))]);
        assert_eq!(b.evaluate(&[0.5]), CMatrix::from_real_diagonal(&[1.5, 1.5]));
        let p = SdpProblem::new(vec![0.0], vec![b]).unwrap();
        let z = vec![CMatrix::from_real_diagonal(&[3.0, 1.0])];
        assert_eq!(p.constraint_values(&z), vec![2.0]);
        assert_eq!(p.f0_value(&z), 5.0);
    }
}
