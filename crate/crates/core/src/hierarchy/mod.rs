//! The symmetric-extension hierarchy: one SDP per level `(k, l)`, solved in
//! min-t form so that an infeasible level comes with a dual certificate.

mod build;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use build::{build_21, build_kl, BlockInfo, ExtensionTest, VariableMap, MAX_COPIES, MAX_EXTENSION_DIM};

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, CMatrix};
use crate::sdp::{check_dual_certificate, min_t_augment, solve_with, CertificateReport, Residuals, SolveStatus, SolverSettings};
use crate::state::DensityMatrix;

/// Partial-transpose eigenvalues below this count as NPT.
pub const PPT_TOL: f64 = 1e-10;
/// Optimal `t` at or below this means an extension was found.
pub const T_TOL: f64 = 1e-7;
/// Width at which the robustness bisection stops.
pub const ROBUSTNESS_WIDTH: f64 = 1e-4;

/// Number of copies of A and B in the extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Level {
    pub k: usize,
    pub l: usize,
}

impl Level {
    pub const fn new(k: usize, l: usize) -> Self {
        Self { k, l }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.k, self.l)
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (k, l) = t
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("level '{s}' should look like 'k,l'")))?;
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad level component '{v}'")));
        let level = Level::new(parse(k)?, parse(l)?);
        if level.k == 0 || level.l == 0 {
            return Err(Error::Parse(format!("level '{s}' needs k, l >= 1")));
        }
        Ok(level)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionMode {
    /// Only the swap of the two A copies is imposed (level (2,1) only).
    SwapSymmetric,
    /// Extension supported on the symmetric subspaces of the copies.
    FullySymmetric,
}

impl FromStr for ExtensionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swap" | "swap-symmetric" => Ok(ExtensionMode::SwapSymmetric),
            "sym" | "full" | "fully-symmetric" => Ok(ExtensionMode::FullySymmetric),
            _ => Err(Error::Parse(format!("unknown extension mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    ExtensionFound,
    Entangled,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestSettings {
    pub t_tol: f64,
    pub solver: SolverSettings,
}

impl Default for TestSettings {
    fn default() -> Self {
        Self { t_tol: T_TOL, solver: SolverSettings::default() }
    }
}

/// Result of one level.
#[derive(Debug, Clone)]
pub struct TestVerdict {
    pub level: Level,
    pub mode: ExtensionMode,
    pub outcome: Outcome,
    /// Optimal shift `t*`; NaN if the solver failed outright.
    pub t_star: f64,
    /// Dual blocks normalized to unit total trace, kept whenever `t* > t_tol`.
    pub certificate: Option<Vec<CMatrix>>,
    pub certificate_report: Option<CertificateReport>,
    /// Extension variables at the optimum.
    pub variables: Vec<f64>,
    pub solver_status: SolveStatus,
    pub iterations: usize,
    pub residuals: Residuals,
    pub weak_duality_min: Option<f64>,
    pub diagnostic: String,
    pub solve_seconds: f64,
}

impl TestVerdict {
    pub fn is_entangled(&self) -> bool {
        self.outcome == Outcome::Entangled
    }
}

#[cfg(not(target_arch = "wasm32"))]
fn elapsed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

#[cfg(target_arch = "wasm32")]
fn elapsed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    (f(), 0.0)
}

pub fn run_test(rho: &DensityMatrix, level: Level) -> Result<TestVerdict> {
    run_test_with(rho, level, None, &TestSettings::default())
}

pub fn run_test_with(
    rho: &DensityMatrix,
    level: Level,
    mode: Option<ExtensionMode>,
    settings: &TestSettings,
) -> Result<TestVerdict> {
    let test = ExtensionTest::build(rho, level, mode)?;
    Ok(run_built(&test, settings))
}

/// Solves an already built test.
pub fn run_built(test: &ExtensionTest, settings: &TestSettings) -> TestVerdict {
    let m = test.m();
    let augmented = min_t_augment(test.problem()).expect("extension problems have c = 0");
    let (sol, seconds) = elapsed(|| solve_with(&augmented, &settings.solver));
    let mut verdict = TestVerdict {
        level: test.level(),
        mode: test.mode(),
        outcome: Outcome::Inconclusive,
        t_star: f64::NAN,
        certificate: None,
        certificate_report: None,
        variables: Vec::new(),
        solver_status: sol.status,
        iterations: sol.iterations.len(),
        residuals: sol.residuals,
        weak_duality_min: sol.min_weak_duality(),
        diagnostic: String::new(),
        solve_seconds: seconds,
    };
    if sol.status != SolveStatus::Optimal {
        verdict.diagnostic = format!("solver did not converge: {}", sol.message);
        return verdict;
    }
    let t_star = sol.x[m];
    verdict.t_star = t_star;
    verdict.variables = sol.x[..m].to_vec();
    if t_star <= settings.t_tol {
        verdict.outcome = Outcome::ExtensionFound;
        verdict.diagnostic = format!("t* = {t_star:.3e} <= {:.1e}", settings.t_tol);
        return verdict;
    }
    let trace: f64 = sol.z_blocks.iter().map(|z| z.trace().re).sum();
    if !(trace > 0.0) {
        verdict.diagnostic = "dual solution has no positive trace".into();
        return verdict;
    }
    let z: Vec<CMatrix> = sol.z_blocks.iter().map(|b| b.scale_real(1.0 / trace).hermitian_part()).collect();
    match check_dual_certificate(test.problem(), &z) {
        Ok(report) => {
            verdict.outcome = if report.passed() { Outcome::Entangled } else { Outcome::Inconclusive };
            verdict.diagnostic = if report.passed() {
                format!("t* = {t_star:.3e}; certificate verified")
            } else {
                format!(
                    "t* = {t_star:.3e} but certificate check failed (min eig {:.2e}, residual {:.2e}, Tr[F0 Z] {:.2e})",
                    report.min_eigenvalue, report.max_constraint_residual, report.f0_value
                )
            };
            verdict.certificate_report = Some(report);
            verdict.certificate = Some(z);
        }
        Err(e) => verdict.diagnostic = format!("certificate check error: {e}"),
    }
    verdict
}

/// Runs the levels in order, stopping after the first entangled verdict.
pub fn run_hierarchy(rho: &DensityMatrix, levels: &[Level], settings: &TestSettings) -> Result<Vec<TestVerdict>> {
    let mut out = Vec::new();
    for &level in levels {
        let v = run_test_with(rho, level, None, settings)?;
        let stop = v.is_entangled();
        out.push(v);
        if stop {
            break;
        }
    }
    Ok(out)
}

/// Levels in increasing order of cost, up to `max_copies` total copies.
pub fn default_levels(max_copies: usize) -> Vec<Level> {
    let mut out = Vec::new();
    for total in 2..=max_copies.min(MAX_COPIES) {
        for l in 1..total {
            let k = total - l;
            if k >= l {
                out.push(Level::new(k, l));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptResult {
    pub is_ppt: bool,
    pub min_eigenvalue: f64,
}

pub fn ppt_test(rho: &DensityMatrix) -> Result<PptResult> {
    let min = min_eigenvalue(&rho.partial_transpose_a())?;
    Ok(PptResult { is_ppt: min >= -PPT_TOL, min_eigenvalue: min })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Robustness {
    pub level: Level,
    /// Smallest tested noise weight at which the level stops detecting
    /// entanglement.
    pub p_star: f64,
    /// Largest tested noise weight still detected.
    pub p_detected: f64,
    pub evaluations: usize,
    pub inconclusive: usize,
}

/// White-noise robustness at one level: bisection on `p` for the mixture
/// `(1-p)ρ + p·I/d`. Inconclusive solves count as not detected.
pub fn robustness(rho: &DensityMatrix, level: Level, settings: &TestSettings) -> Result<Robustness> {
    let mut evaluations = 0;
    let mut inconclusive = 0;
    let mut detected = |p: f64| -> Result<bool> {
        let v = run_test_with(&rho.mix_with_identity(p), level, None, settings)?;
        evaluations += 1;
        if v.outcome == Outcome::Inconclusive {
            inconclusive += 1;
        }
        Ok(v.is_entangled())
    };
    if !detected(0.0)? {
        return Ok(Robustness { level, p_star: 0.0, p_detected: f64::NAN, evaluations, inconclusive });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > ROBUSTNESS_WIDTH {
        let mid = 0.5 * (lo + hi);
        if detected(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Robustness { level, p_star: hi, p_detected: lo, evaluations, inconclusive })
}
