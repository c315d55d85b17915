//! Infeasible-start primal-dual interior-point method with Nesterov-Todd
//! scaling and Mehrotra predictor-corrector steps.

use serde::{Deserialize, Serialize};

use super::{check_dual_certificate, SdpProblem};
use crate::linalg::{cholesky, eig_hermitian, lower_inverse, CMatrix, RealCholesky};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Target for relative primal/dual infeasibility and gap.
    pub tol: f64,
    /// Looser tolerance accepted when the iteration stalls.
    pub accept_tol: f64,
    pub max_iter: usize,
    pub min_step: f64,
    pub step_fraction: f64,
    /// Dual objective beyond which a primal-infeasibility ray is suspected.
    pub infeasibility_threshold: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            accept_tol: 1e-7,
            max_iter: 500,
            min_step: 1e-12,
            step_fraction: 0.98,
            infeasibility_threshold: 1e6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasibleCertificate,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖F(x) − S‖ / (1 + ‖F₀‖)`
    pub primal_infeasibility: f64,
    /// `‖Tr[FᵢZ] − c‖ / (1 + ‖c‖)`
    pub dual_infeasibility: f64,
    /// `|cᵀx + Tr[F₀Z]| / (1 + |cᵀx| + |Tr[F₀Z]|)`
    pub relative_gap: f64,
    pub absolute_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub residuals: Residuals,
    pub mu: f64,
    pub step_primal: f64,
    pub step_dual: f64,
    /// `cᵀx + Tr[F₀Z]`, recorded only when both iterates are feasible to
    /// the acceptance tolerance.
    pub weak_duality: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub z_blocks: Vec<CMatrix>,
    pub residuals: Residuals,
    pub iterations: Vec<IterationRecord>,
    pub message: String,
}

impl SdpSolution {
    /// Smallest weak-duality value over the logged feasible iterates.
    pub fn min_weak_duality(&self) -> Option<f64> {
        self.iterations.iter().filter_map(|r| r.weak_duality).reduce(f64::min)
    }
}

pub fn solve(p: &SdpProblem) -> SdpSolution {
    solve_with(p, &SolverSettings::default())
}

/// NT scaling data for one block: `rinv S rinv† = r† Z r = diag(λ)` with
/// `r = rinv⁻¹`.
struct Scaling {
    lambda: Vec<f64>,
    rinv: CMatrix,
    winv: CMatrix,
}

fn scaling(s: &CMatrix, z: &CMatrix) -> Option<Scaling> {
    let l = cholesky(s).ok()?;
    let linv = lower_inverse(&l);
    let t = l.adjoint().matmul(z).matmul(&l);
    let e = eig_hermitian(&t.hermitian_part()).ok()?;
    if e.values[0] <= 0.0 || !e.values.iter().all(|v| v.is_finite()) {
        return None;
    }
    let lambda: Vec<f64> = e.values.iter().map(|w| w.sqrt()).collect();
    let mut rinv = e.vectors.adjoint().matmul(&linv);
    for (i, lam) in lambda.iter().enumerate() {
        let f = lam.sqrt();
        rinv.row_mut(i).iter_mut().for_each(|v| *v *= f);
    }
    let winv = rinv.adjoint_matmul(&rinv).hermitian_part();
    Some(Scaling { lambda, rinv, winv })
}

/// Largest `α ≤ 1/fraction`-capped step keeping `diag(λ) + α·d ⪰ 0`.
fn max_step(lambda: &[f64], d: &CMatrix) -> Option<f64> {
    let n = lambda.len();
    let inv: Vec<f64> = lambda.iter().map(|l| 1.0 / l.sqrt()).collect();
    let scaled = CMatrix::from_fn(n, n, |i, j| d[(i, j)] * (inv[i] * inv[j]));
    let min = eig_hermitian(&scaled.hermitian_part()).ok()?.values[0];
    Some(if min < 0.0 { -1.0 / min } else { f64::INFINITY })
}

struct Direction {
    dx: Vec<f64>,
    ds: Vec<CMatrix>,
    dz: Vec<CMatrix>,
    ds_scaled: Vec<CMatrix>,
    dz_scaled: Vec<CMatrix>,
}

fn frob(ms: &[CMatrix]) -> f64 {
    ms.iter().map(|m| m.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn solve_with(p: &SdpProblem, settings: &SolverSettings) -> SdpSolution {
    let m = p.m();
    let blocks = p.blocks();
    let n_total: usize = p.block_dims().iter().sum();
    let f0_norm = frob(&blocks.iter().map(|b| b.f0.clone()).collect::<Vec<_>>());
    let c_norm = norm2(p.c());
    let tau = 1.0 + blocks.iter().map(|b| b.f0.frobenius_norm()).fold(0.0, f64::max);

    let mut x = vec![0.0; m];
    let mut s: Vec<CMatrix> = blocks.iter().map(|b| CMatrix::identity(b.dim()).scale_real(tau)).collect();
    let mut z: Vec<CMatrix> = s.clone();
    let mut log = Vec::new();

    let finish = |status: SolveStatus,
                  x: Vec<f64>,
                  z: Vec<CMatrix>,
                  residuals: Residuals,
                  log: Vec<IterationRecord>,
                  message: String| {
        let objective = p.c().iter().zip(&x).map(|(a, b)| a * b).sum();
        let dual_objective = -p.f0_value(&z);
        SdpSolution { status, x, objective, dual_objective, z_blocks: z, residuals, iterations: log, message }
    };

    let mut step_p = 0.0;
    let mut step_d = 0.0;
    for iter in 0..=settings.max_iter {
        // Residuals at the current iterate.
        let rp: Vec<CMatrix> = blocks.iter().zip(&s).map(|(b, sb)| &b.evaluate(&x) - sb).collect();
        let tr_fz = p.constraint_values(&z);
        let rd: Vec<f64> = tr_fz.iter().zip(p.c()).map(|(t, ci)| t - ci).collect();
        let pobj: f64 = p.c().iter().zip(&x).map(|(a, b)| a * b).sum();
        let f0z = p.f0_value(&z);
        let dobj = -f0z;
        let gap = pobj - dobj;
        let mu = s.iter().zip(&z).map(|(a, b)| a.trace_product_re(b)).sum::<f64>() / n_total as f64;
        let res = Residuals {
            primal_infeasibility: frob(&rp) / (1.0 + f0_norm),
            dual_infeasibility: norm2(&rd) / (1.0 + c_norm),
            relative_gap: gap.abs() / (1.0 + pobj.abs() + dobj.abs()),
            absolute_gap: gap,
        };
        let feasible = res.primal_infeasibility <= settings.accept_tol && res.dual_infeasibility <= settings.accept_tol;
        log.push(IterationRecord {
            iteration: iter,
            primal_objective: pobj,
            dual_objective: dobj,
            residuals: res,
            mu,
            step_primal: step_p,
            step_dual: step_d,
            weak_duality: feasible.then_some(gap),
        });
        let within = |tol: f64| {
            res.primal_infeasibility <= tol && res.dual_infeasibility <= tol && res.relative_gap <= tol
        };
        if within(settings.tol) {
            return finish(SolveStatus::Optimal, x, z, res, log, format!("converged in {iter} iterations"));
        }

        // A dual ray: −Tr[F₀Z] large while Tr[FᵢZ]/Tr Z → 0.
        if dobj > settings.infeasibility_threshold {
            let tr: f64 = z.iter().map(|zb| zb.trace().re).sum();
            let normalized: Vec<CMatrix> = z.iter().map(|zb| zb.scale_real(1.0 / tr)).collect();
            if let Ok(report) = check_dual_certificate(p, &normalized) {
                if report.passed() {
                    return finish(
                        SolveStatus::PrimalInfeasibleCertificate,
                        x,
                        normalized,
                        res,
                        log,
                        format!("infeasibility certificate with Tr[F0 Z] = {:e}", report.f0_value),
                    );
                }
            }
        }
        if pobj < -settings.infeasibility_threshold && res.primal_infeasibility <= settings.accept_tol {
            return finish(SolveStatus::NumericalFailure, x, z, res, log, "primal objective appears unbounded".into());
        }
        let stalled = |x: Vec<f64>, z: Vec<CMatrix>, log: Vec<IterationRecord>, why: &str| {
            if within(settings.accept_tol) {
                finish(SolveStatus::Optimal, x, z, res, log, format!("{why}; accepted at tolerance {:e}", settings.accept_tol))
            } else {
                finish(SolveStatus::NumericalFailure, x, z, res, log, why.to_string())
            }
        };
        if iter == settings.max_iter {
            return stalled(x, z, log, "iteration limit reached");
        }

        let Some(sc) = s.iter().zip(&z).map(|(sb, zb)| scaling(sb, zb)).collect::<Option<Vec<_>>>() else {
            return stalled(x, z, log, "lost positive definiteness");
        };

        // Schur complement M_ij = Σ_b Re Tr[F_i W⁻¹ F_j W⁻¹].
        let mut schur = vec![0.0; m * m];
        for j in 0..m {
            for (b, block) in blocks.iter().enumerate() {
                if block.f[j].nnz() == 0 {
                    continue;
                }
                let g = block.f[j].sandwich(&sc[b].winv);
                for i in 0..=j {
                    schur[i * m + j] += block.f[i].trace_with(&g);
                }
            }
        }
        for j in 0..m {
            for i in 0..j {
                schur[j * m + i] = schur[i * m + j];
            }
        }
        let chol = {
            let max_diag = (0..m).map(|i| schur[i * m + i]).fold(0.0, f64::max).max(1e-300);
            let mut reg = 0.0;
            loop {
                let mut a = schur.clone();
                for i in 0..m {
                    a[i * m + i] += reg * max_diag;
                }
                match RealCholesky::factor(&a, m) {
                    Ok(c) => break Some(c),
                    Err(_) if reg < 1e-6 => reg = if reg == 0.0 { 1e-14 } else { reg * 100.0 },
                    Err(_) => break None,
                }
            }
        };
        let Some(chol) = chol else {
            return stalled(x, z, log, "Schur complement is singular");
        };

        // Scaled primal residual R̃p = rinv Rp rinv†.
        let rp_scaled: Vec<CMatrix> = sc.iter().zip(&rp).map(|(scb, r)| scb.rinv.congruence(r)).collect();

        let direction = |rhs: &[CMatrix]| -> Direction {
            // U_ij = 2 rhs_ij / (λ_i + λ_j) solves the symmetrized
            // linearized complementarity for Δs̃ + Δz̃.
            let u: Vec<CMatrix> = sc
                .iter()
                .zip(rhs)
                .map(|(scb, r)| {
                    let l = &scb.lambda;
                    CMatrix::from_fn(l.len(), l.len(), |i, j| r[(i, j)] * (2.0 / (l[i] + l[j])))
                })
                .collect();
            let h: Vec<CMatrix> = sc
                .iter()
                .zip(u.iter().zip(&rp_scaled))
                .map(|(scb, (ub, rpb))| scb.rinv.adjoint().congruence(&(ub - rpb)))
                .collect();
            let rhs_x: Vec<f64> = (0..m)
                .map(|i| blocks.iter().zip(&h).map(|(b, hb)| b.f[i].trace_with(hb)).sum::<f64>() + rd[i])
                .collect();
            let dx = chol.solve(&rhs_x);
            let mut ds = rp.clone();
            for (b, block) in blocks.iter().enumerate() {
                for (fi, &d) in block.f.iter().zip(&dx) {
                    if d != 0.0 {
                        fi.add_to(&mut ds[b], d);
                    }
                }
                ds[b].symmetrize_in_place();
            }
            let ds_scaled: Vec<CMatrix> = sc.iter().zip(&ds).map(|(scb, d)| scb.rinv.congruence(d)).collect();
            let dz_scaled: Vec<CMatrix> = u.iter().zip(&ds_scaled).map(|(ub, d)| ub - d).collect();
            let dz: Vec<CMatrix> = sc
                .iter()
                .zip(&dz_scaled)
                .map(|(scb, d)| scb.rinv.adjoint().congruence(d).hermitian_part())
                .collect();
            Direction { dx, ds, dz, ds_scaled, dz_scaled }
        };
        let steps = |d: &Direction| -> Option<(f64, f64)> {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for (b, scb) in sc.iter().enumerate() {
                ap = ap.min(max_step(&scb.lambda, &d.ds_scaled[b])?);
                ad = ad.min(max_step(&scb.lambda, &d.dz_scaled[b])?);
            }
            Some(((settings.step_fraction * ap).min(1.0), (settings.step_fraction * ad).min(1.0)))
        };

        // Predictor: target the complementarity λ² → 0.
        let rhs_aff: Vec<CMatrix> = sc
            .iter()
            .map(|scb| CMatrix::from_real_diagonal(&scb.lambda.iter().map(|l| -l * l).collect::<Vec<_>>()))
            .collect();
        let aff = direction(&rhs_aff);
        let Some((ap_aff, ad_aff)) = steps(&aff) else {
            return stalled(x, z, log, "eigendecomposition failed in step computation");
        };
        let mut mu_aff = 0.0;
        for (b, scb) in sc.iter().enumerate() {
            let lam = CMatrix::from_real_diagonal(&scb.lambda);
            let mut sa = lam.clone();
            sa.axpy_real(ap_aff, &aff.ds_scaled[b]);
            let mut za = lam;
            za.axpy_real(ad_aff, &aff.dz_scaled[b]);
            mu_aff += sa.trace_product_re(&za);
        }
        mu_aff /= n_total as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector with the second-order term.
        let rhs_cor: Vec<CMatrix> = sc
            .iter()
            .enumerate()
            .map(|(b, scb)| {
                let prod = aff.ds_scaled[b].matmul(&aff.dz_scaled[b]);
                let mut r = prod.hermitian_part().scale_real(-1.0);
                for (i, l) in scb.lambda.iter().enumerate() {
                    r[(i, i)] += sigma * mu - l * l;
                }
                r
            })
            .collect();
        let dir = direction(&rhs_cor);
        let Some((ap, ad)) = steps(&dir) else {
            return stalled(x, z, log, "eigendecomposition failed in step computation");
        };
        if ap < settings.min_step && ad < settings.min_step {
            return stalled(x, z, log, "step length below minimum");
        }
        step_p = ap;
        step_d = ad;
        for (xi, d) in x.iter_mut().zip(&dir.dx) {
            *xi += ap * d;
        }
        for b in 0..blocks.len() {
            s[b].axpy_real(ap, &dir.ds[b]);
            s[b].symmetrize_in_place();
            z[b].axpy_real(ad, &dir.dz[b]);
            z[b].symmetrize_in_place();
        }
        if x.iter().any(|v| !v.is_finite()) || s.iter().chain(&z).any(|m| m.data().iter().any(|v| !v.is_finite())) {
            return finish(SolveStatus::NumericalFailure, x, z, res, log, "non-finite iterate".into());
        }
    }
    unreachable!("the loop returns at the iteration limit")
}
