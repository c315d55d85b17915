use serde::{Deserialize, Serialize};

use super::SdpProblem;
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, CMatrix};

pub const CERT_PSD_TOL: f64 = 1e-9;
pub const CERT_CONSTRAINT_TOL: f64 = 1e-7;
pub const CERT_NEGATIVITY_TOL: f64 = 1e-8;

/// Outcome of checking `Z ⪰ 0`, `Tr[Fᵢ Z] = 0`, `Tr[F₀ Z] < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub min_eigenvalue: f64,
    pub max_constraint_residual: f64,
    pub f0_value: f64,
    pub trace: f64,
    pub psd_ok: bool,
    pub constraints_ok: bool,
    pub negativity_ok: bool,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.psd_ok && self.constraints_ok && self.negativity_ok
    }
}

/// Verifies a candidate infeasibility certificate using only eigenvalues and
/// traces of the supplied blocks.
pub fn check_dual_certificate(p: &SdpProblem, z: &[CMatrix]) -> Result<CertificateReport> {
    if z.len() != p.blocks().len() {
        return Err(Error::DimensionMismatch(format!("{} dual blocks for {} problem blocks", z.len(), p.blocks().len())));
    }
    for (b, (zb, block)) in z.iter().zip(p.blocks()).enumerate() {
        if !zb.is_square() || zb.rows() != block.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dual block {b} is {}x{}, expected {}",
                zb.rows(),
                zb.cols(),
                block.dim()
            )));
        }
    }
    let mut min_eig = f64::INFINITY;
    let mut trace = 0.0;
    for zb in z {
        min_eig = min_eig.min(min_eigenvalue(&zb.hermitian_part())?);
        trace += zb.trace().re;
    }
    let max_residual = p.constraint_values(z).into_iter().map(f64::abs).fold(0.0, f64::max);
    let f0_value = p.f0_value(z);
    Ok(CertificateReport {
        min_eigenvalue: min_eig,
        max_constraint_residual: max_residual,
        f0_value,
        trace,
        psd_ok: min_eig >= -CERT_PSD_TOL,
        constraints_ok: max_residual <= CERT_CONSTRAINT_TOL,
        negativity_ok: f0_value <= -CERT_NEGATIVITY_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{CoefMatrix, SdpBlock};

    /// `x·diag(1,−1) + diag(−1,−1) ⪰ 0` has no solution.
    fn infeasible_toy() -> SdpProblem {
        let f1 = CoefMatrix::from_dense(CMatrix::from_real_diagonal(&[1.0, -1.0]));
        SdpProblem::new(vec![0.0], vec![SdpBlock::new(CMatrix::from_real_diagonal(&[-1.0, -1.0]), vec![f1])]).unwrap()
    }

    #[test]
    fn zero_is_not_a_certificate() {
        let rep = check_dual_certificate(&infeasible_toy(), &[CMatrix::zeros(2, 2)]).unwrap();
        assert!(rep.psd_ok && rep.constraints_ok);
        assert!(!rep.negativity_ok);
        assert!(!rep.passed());
    }

    #[test]
    fn hand_certificate_passes() {
        // Tr[F1 Z] = 1/2 − 1/2 = 0 and Tr[F0 Z] = −1.
        let z = CMatrix::from_real_diagonal(&[0.5, 0.5]);
        let rep = check_dual_certificate(&infeasible_toy(), &[z]).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!((rep.f0_value + 1.0).abs() < 1e-15);
    }

    #[test]
    fn unbalanced_or_indefinite_fail() {
        let p = infeasible_toy();
        assert!(!check_dual_certificate(&p, &[CMatrix::from_real_diagonal(&[0.6, 0.4])]).unwrap().constraints_ok);
        assert!(!check_dual_certificate(&p, &[CMatrix::from_real_diagonal(&[-0.5, -0.5])]).unwrap().psd_ok);
        assert!(check_dual_certificate(&p, &[CMatrix::zeros(3, 3)]).is_err());
        assert!(check_dual_certificate(&p, &[]).is_err());
    }
}
