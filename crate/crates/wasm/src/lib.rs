//! WebAssembly bindings for the demo page in `web/`. Results cross the
//! boundary as flat `Float64Array`s or JSON strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use symext::hierarchy::{ppt_test, run_built, ExtensionTest, Level, Outcome, TestSettings};
use symext::witness::{extract_witness, paper_witness, SEESAW_SEED};
use symext::zoo;

fn js_err(e: symext::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|i| 5.0 * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Smallest partial-transpose eigenvalue of `ρ_α` on an even grid over
/// `[0, 5]`, as interleaved `[α₀, λ₀, α₁, λ₁, …]`.
#[wasm_bindgen]
pub fn ppt_scan(points: usize) -> Result<Vec<f64>, JsError> {
    let mut out = Vec::with_capacity(2 * points);
    for alpha in grid(points) {
        let rho = zoo::rho_alpha(alpha).map_err(js_err)?.rho;
        out.push(alpha);
        out.push(ppt_test(&rho).map_err(js_err)?.min_eigenvalue);
    }
    Ok(out)
}

#[derive(Serialize)]
struct Verdict {
    alpha: f64,
    outcome: Outcome,
    t_star: Option<f64>,
    ppt_min_eigenvalue: f64,
    iterations: usize,
    diagnostic: String,
}

fn level_21(alpha: f64) -> Result<(ExtensionTest, symext::hierarchy::TestVerdict), JsError> {
    let rho = zoo::rho_alpha(alpha).map_err(js_err)?.rho;
    let test = ExtensionTest::build(&rho, Level::new(2, 1), None).map_err(js_err)?;
    let verdict = run_built(&test, &TestSettings::default());
    Ok((test, verdict))
}

/// Level (2,1) test of `ρ_α`, returned as a JSON object.
#[wasm_bindgen]
pub fn test_rho_alpha(alpha: f64) -> Result<String, JsError> {
    let (test, v) = level_21(alpha)?;
    let verdict = Verdict {
        alpha,
        outcome: v.outcome,
        t_star: v.t_star.is_finite().then_some(v.t_star),
        ppt_min_eigenvalue: ppt_test(test.rho()).map_err(js_err)?.min_eigenvalue,
        iterations: v.iterations,
        diagnostic: v.diagnostic,
    };
    serde_json::to_string(&verdict).map_err(|e| JsError::new(&e.to_string()))
}

/// `Tr[W ρ_β]` over a grid of β for the witness read off the level (2,1)
/// certificate at `alpha`, interleaved as `[β₀, v₀, …]`. With
/// `alpha < 0` the explicit 3×3 witness is used instead.
#[wasm_bindgen]
pub fn witness_curve(alpha: f64, points: usize) -> Result<Vec<f64>, JsError> {
    let w = if alpha < 0.0 {
        paper_witness()
    } else {
        let (test, verdict) = level_21(alpha)?;
        extract_witness(&verdict, &test, 20, SEESAW_SEED).map_err(js_err)?.w
    };
    let mut out = Vec::with_capacity(2 * points);
    for beta in grid(points) {
        let rho = zoo::rho_alpha(beta).map_err(js_err)?.rho;
        out.push(beta);
        out.push(rho.matrix().trace_product_re(&w));
    }
    Ok(out)
}
