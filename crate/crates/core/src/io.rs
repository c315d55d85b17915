//! JSON state and witness files, and the result records printed by the
//! command-line tool.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{ExtensionMode, Level, Outcome, PptResult, TestSettings, TestVerdict};
use crate::linalg::{c, CMatrix};
use crate::sdp::{CertificateReport, SolveStatus, CERT_CONSTRAINT_TOL, CERT_NEGATIVITY_TOL, CERT_PSD_TOL};
use crate::state::DensityMatrix;
use crate::witness::{SosReport, Witness};
use crate::zoo;

/// Admission tolerance for matrices read from text.
pub const LOAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: [usize; 2],
    /// Row-major `[re, im]` pairs.
    pub matrix: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<BTreeMap<String, f64>>,
}

fn flatten(m: &CMatrix) -> Vec<[f64; 2]> {
    m.data().iter().map(|z| [z.re, z.im]).collect()
}

fn unflatten(n: usize, entries: &[[f64; 2]]) -> Result<CMatrix> {
    if entries.len() != n * n {
        return Err(Error::Parse(format!("{} matrix entries, expected {}", entries.len(), n * n)));
    }
    if entries.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Parse("non-finite matrix entry".into()));
    }
    CMatrix::from_vec(n, n, entries.iter().map(|[re, im]| c(*re, *im)).collect())
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix, name: Option<String>, params: Option<BTreeMap<String, f64>>) -> Self {
        Self { dims: [rho.dim_a(), rho.dim_b()], matrix: flatten(rho.matrix()), name, params }
    }

    pub fn from_labeled(s: &zoo::LabeledState) -> Self {
        let params = (!s.params.is_empty()).then(|| s.params.iter().cloned().collect());
        Self::from_state(&s.rho, Some(s.name.clone()), params)
    }

    /// Hermitian, unit trace and PSD, each to `1e-9`.
    pub fn to_state(&self) -> Result<DensityMatrix> {
        let [d_a, d_b] = self.dims;
        let m = unflatten(d_a * d_b, &self.matrix)?;
        DensityMatrix::with_tolerance(m, d_a, d_b, LOAD_TOL)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

/// A state named on the command line: `zoo:name?k=v&...` or a file path.
#[derive(Debug, Clone)]
pub struct StateSource {
    pub label: String,
    pub rho: DensityMatrix,
}

pub fn load_state_source(src: &str) -> Result<StateSource> {
    if src.starts_with("zoo:") {
        let s = zoo::from_uri(src)?;
        return Ok(StateSource { label: src.to_string(), rho: s.rho });
    }
    let file = StateFile::read(Path::new(src))?;
    Ok(StateSource { label: src.to_string(), rho: file.to_state()? })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub t_tol: f64,
    pub solver_tol: f64,
    pub solver_accept_tol: f64,
    pub cert_psd_tol: f64,
    pub cert_constraint_tol: f64,
    pub cert_negativity_tol: f64,
}

impl From<&TestSettings> for Tolerances {
    fn from(s: &TestSettings) -> Self {
        Self {
            t_tol: s.t_tol,
            solver_tol: s.solver.tol,
            solver_accept_tol: s.solver.accept_tol,
            cert_psd_tol: CERT_PSD_TOL,
            cert_constraint_tol: CERT_CONSTRAINT_TOL,
            cert_negativity_tol: CERT_NEGATIVITY_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub value_on_state: f64,
    pub min_product_value: f64,
    pub verified: bool,
    pub seesaw_seed: u64,
    pub seesaw_trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sos: Option<SosReport>,
}

impl WitnessSummary {
    pub fn new(w: &Witness, sos: Option<SosReport>) -> Self {
        Self {
            value_on_state: w.value_on_state,
            min_product_value: w.min_product_value_estimate,
            verified: w.verified(),
            seesaw_seed: w.seed,
            seesaw_trials: w.trials,
            sos,
        }
    }
}

/// One line of output per tested level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub state: String,
    pub level: String,
    pub mode: ExtensionMode,
    pub outcome: Outcome,
    pub t_star: Option<f64>,
    pub ppt: Option<PptResult>,
    pub solver_status: SolveStatus,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSummary>,
    pub diagnostic: String,
    pub solve_seconds: f64,
    pub tolerances: Tolerances,
}

impl ResultRecord {
    pub fn from_verdict(state: &str, v: &TestVerdict, ppt: Option<PptResult>, settings: &TestSettings) -> Self {
        Self {
            state: state.to_string(),
            level: v.level.to_string(),
            mode: v.mode,
            outcome: v.outcome,
            t_star: v.t_star.is_finite().then_some(v.t_star),
            ppt,
            solver_status: v.solver_status,
            iterations: v.iterations,
            certificate: v.certificate_report,
            p_star: None,
            witness: None,
            diagnostic: v.diagnostic.clone(),
            solve_seconds: v.solve_seconds,
            tolerances: settings.into(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub dims: [usize; 2],
    pub matrix: Vec<[f64; 2]>,
    pub source: String,
    pub level: Level,
    pub mode: ExtensionMode,
    pub summary: WitnessSummary,
}

impl WitnessFile {
    pub fn new(source: &str, level: Level, mode: ExtensionMode, d_a: usize, d_b: usize, w: &Witness, sos: Option<SosReport>) -> Self {
        Self { dims: [d_a, d_b], matrix: flatten(&w.w), source: source.into(), level, mode, summary: WitnessSummary::new(w, sos) }
    }

    pub fn operator(&self) -> Result<CMatrix> {
        unflatten(self.dims[0] * self.dims[1], &self.matrix)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}
