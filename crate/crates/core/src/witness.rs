//! Entanglement witnesses from dual certificates, and independent checks of
//! them: the value on the state, a product-state search and the
//! sum-of-squares identity behind nonnegativity.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{ExtensionTest, Outcome, TestVerdict};
use crate::linalg::{c, eig_hermitian, kron_vec, r, vec_norm, CMatrix};
use crate::state::{build_basis, ProductVector};

/// Default seed of the product-state search.
pub const SEESAW_SEED: u64 = 0x5DF5;
pub const SEESAW_STARTS: usize = 50;
pub const SEESAW_MAX_ROUNDS: usize = 200;
pub const SEESAW_TOL: f64 = 1e-10;
/// A witness counts as nonnegative on products down to this value.
pub const PRODUCT_TOL: f64 = 1e-7;
/// A witness must go below this on the state.
pub const STATE_VALUE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Witness {
    pub w: CMatrix,
    /// Dual blocks as returned by the solver, normalized to unit total trace.
    pub parts: Vec<CMatrix>,
    pub value_on_state: f64,
    pub min_product_value_estimate: f64,
    pub min_product_vector: ProductVector,
    pub seed: u64,
    pub trials: usize,
}

impl Witness {
    /// Negative on the state and nonnegative on every product vector found.
    pub fn verified(&self) -> bool {
        self.value_on_state < -STATE_VALUE_TOL && self.min_product_value_estimate >= -PRODUCT_TOL
    }
}

/// `Λ*(Y)` for `Y = Σ_b (W_b Z_b W_b†)^{T_{I_b}}`, expanded in the local
/// operator bases so that `Tr[Λ(ρ)Y] = Tr[ρ Λ*(Y)]`.
pub fn adjoint_map(z_blocks: &[CMatrix], test: &ExtensionTest) -> Result<CMatrix> {
    let y = test.lift(z_blocks)?;
    adjoint_of_lifted(&y, test)
}

/// `Λ*` applied to an extension-space operator.
pub fn adjoint_of_lifted(y: &CMatrix, test: &ExtensionTest) -> Result<CMatrix> {
    let rho = test.rho();
    let (d_a, d_b) = (rho.dim_a(), rho.dim_b());
    let n = test.extension_structure().total_dim();
    if y.rows() != n || !y.is_square() {
        return Err(Error::DimensionMismatch(format!("operator of dimension {}, expected {n}", y.rows())));
    }
    let ba = build_basis(d_a)?;
    let bb = build_basis(d_b)?;
    let scale = 1.0 / (ba.alpha() * bb.alpha());
    let mut w = CMatrix::zeros(d_a * d_b, d_a * d_b);
    for sa in ba.elements() {
        for sb in bb.elements() {
            let op = sa.kron(sb);
            let coef = scale * test.fixed_extension(&op)?.trace_product_re(y);
            if coef != 0.0 {
                w.axpy_real(coef, &op);
            }
        }
    }
    Ok(w.hermitian_part())
}

/// Builds and checks the witness carried by an entangled verdict.
pub fn extract_witness(verdict: &TestVerdict, test: &ExtensionTest, trials: usize, seed: u64) -> Result<Witness> {
    let z = match (&verdict.outcome, &verdict.certificate) {
        (Outcome::Entangled, Some(z)) => z,
        _ => return Err(Error::MissingCertificate),
    };
    let w = adjoint_map(z, test)?;
    let value_on_state = test.rho().matrix().trace_product_re(&w);
    let search = verify_on_products(&w, test.rho().dim_a(), test.rho().dim_b(), trials, seed)?;
    Ok(Witness {
        w,
        parts: z.clone(),
        value_on_state,
        min_product_value_estimate: search.min_value,
        min_product_vector: search.argmin,
        seed,
        trials,
    })
}

#[derive(Debug, Clone)]
pub struct ProductSearch {
    pub min_value: f64,
    pub argmin: ProductVector,
    pub rounds: usize,
}

fn random_vector(d: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect();
    let n = vec_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// `⟨x|W|x⟩` on B (`on_b = true`) or `⟨y|W|y⟩` on A.
fn reduced(w: &CMatrix, d_a: usize, d_b: usize, v: &[Complex64], on_b: bool) -> CMatrix {
    let n = if on_b { d_b } else { d_a };
    CMatrix::from_fn(n, n, |p, q| {
        let mut acc = c(0.0, 0.0);
        for (s, vs) in v.iter().enumerate() {
            for (t, vt) in v.iter().enumerate() {
                let (row, col) = if on_b { (s * d_b + p, t * d_b + q) } else { (p * d_b + s, q * d_b + t) };
                acc += vs.conj() * w[(row, col)] * vt;
            }
        }
        acc
    })
}

/// Multi-start see-saw minimization of `⟨xy|W|xy⟩` over unit product
/// vectors.
pub fn verify_on_products(w: &CMatrix, d_a: usize, d_b: usize, trials: usize, seed: u64) -> Result<ProductSearch> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    if w.rows() != d_a * d_b || !w.is_square() {
        return Err(Error::DimensionMismatch(format!("operator of dimension {} for {d_a}x{d_b}", w.rows())));
    }
    let w = w.hermitian_part();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<ProductSearch> = None;
    for _ in 0..trials {
        let mut x = random_vector(d_a, &mut rng);
        let mut y = Vec::new();
        let mut value = f64::INFINITY;
        let mut rounds = 0;
        for round in 0..SEESAW_MAX_ROUNDS {
            rounds = round + 1;
            let eb = eig_hermitian(&reduced(&w, d_a, d_b, &x, true).hermitian_part())?;
            y = eb.vector(0);
            let ea = eig_hermitian(&reduced(&w, d_a, d_b, &y, false).hermitian_part())?;
            x = ea.vector(0);
            let next = ea.values[0];
            let done = (value - next).abs() < SEESAW_TOL;
            value = next;
            if done {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| value < b.min_value) {
            best = Some(ProductSearch { min_value: value, argmin: ProductVector { x: x.clone(), y: y.clone() }, rounds });
        }
    }
    Ok(best.expect("at least one trial"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SosReport {
    pub samples: usize,
    /// Largest `|⟨v|Y|v⟩ − Σ_b ⟨v_b|X_b|v_b⟩|` over the samples.
    pub max_identity_residual: f64,
    /// Smallest single term `⟨v_b|X_b|v_b⟩`.
    pub min_term: f64,
    /// Largest `|⟨v|Y|v⟩ − ⟨xy|w|xy⟩|`; zero up to the dual constraint
    /// residuals, since `v v†` is a valid extension of `|xy⟩⟨xy|`.
    pub max_witness_residual: f64,
}

impl SosReport {
    pub fn passed(&self) -> bool {
        self.max_identity_residual < 1e-10 && self.min_term >= -1e-10
    }
}

/// Checks at random unit product vectors that `⟨v|Y|v⟩` with
/// `v = x^{⊗k} ⊗ y^{⊗l}` splits into one term per block, each an expectation
/// of a PSD part on a partially conjugated vector.
pub fn verify_sos(test: &ExtensionTest, z_blocks: &[CMatrix], samples: usize, seed: u64) -> Result<SosReport> {
    let parts = test.lift_parts(z_blocks)?;
    let y_op = test.lift(z_blocks)?;
    let w = adjoint_of_lifted(&y_op, test)?;
    let (d_a, d_b) = (test.rho().dim_a(), test.rho().dim_b());
    let ts = test.extension_structure();
    let labels = ts.labels();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SosReport { samples, max_identity_residual: 0.0, min_term: f64::INFINITY, max_witness_residual: 0.0 };
    for _ in 0..samples {
        let x = random_vector(d_a, &mut rng);
        let y = random_vector(d_b, &mut rng);
        let factor = |pos: usize, conj: bool| -> Vec<Complex64> {
            let v = if labels[pos] == crate::linalg::Party::A { &x } else { &y };
            if conj {
                v.iter().map(|z| z.conj()).collect()
            } else {
                v.clone()
            }
        };
        let joint = |transposed: &[usize]| -> Vec<Complex64> {
            (0..labels.len()).fold(vec![r(1.0)], |acc, pos| kron_vec(&acc, &factor(pos, transposed.contains(&pos))))
        };
        let v = joint(&[]);
        let lhs = y_op.expectation(&v).re;
        let mut rhs = 0.0;
        for (info, part) in test.block_map().iter().zip(&parts) {
            let term = part.expectation(&joint(&info.transposed)).re;
            report.min_term = report.min_term.min(term);
            rhs += term;
        }
        report.max_identity_residual = report.max_identity_residual.max((lhs - rhs).abs());
        let form = w.expectation(&kron_vec(&x, &y)).re;
        report.max_witness_residual = report.max_witness_residual.max((lhs - form).abs());
    }
    if samples == 0 {
        report.min_term = 0.0;
    }
    Ok(report)
}

/// The explicit 3×3 witness for `ρ_α`, `α > 3`.
pub fn paper_witness() -> CMatrix {
    let mut w = CMatrix::zeros(9, 9);
    let idx = |a: usize, b: usize| 3 * a + b;
    for i in 0..3 {
        w[(idx(i, i), idx(i, i))] += r(2.0);
    }
    for (a, b) in [(0, 2), (1, 0), (2, 1)] {
        w[(idx(a, b), idx(a, b))] += r(1.0);
    }
    for i in 0..3 {
        for j in 0..3 {
            w[(idx(i, i), idx(j, j))] -= r(1.0);
        }
    }
    w
}

/// The eight squared magnitudes displayed for the explicit witness.
pub fn paper_sos_terms(x: &[Complex64], y: &[Complex64]) -> f64 {
    let xc: Vec<Complex64> = x.iter().map(|z| z.conj()).collect();
    let yc: Vec<Complex64> = y.iter().map(|z| z.conj()).collect();
    let two = r(2.0);
    let big = [
        two * x[0] * x[1] * yc[2] - x[2] * x[0] * yc[1] - x[1] * x[2] * yc[0],
        two * x[0] * xc[0] * y[0] - two * x[1] * xc[0] * y[1] + x[1] * xc[1] * y[0] - x[2] * xc[0] * y[2],
        two * x[0] * xc[0] * y[2] - two * x[1] * xc[2] * y[1] + x[2] * xc[2] * y[2] - x[0] * xc[2] * y[0],
        two * x[0] * xc[1] * y[0] - two * x[2] * xc[2] * y[1] + x[2] * xc[1] * y[2] - x[1] * xc[1] * y[1],
    ];
    let small = [
        x[2] * x[0] * yc[1] - x[1] * x[2] * yc[0],
        x[1] * xc[1] * y[0] - x[2] * xc[0] * y[2],
        x[2] * xc[2] * y[2] - x[0] * xc[2] * y[0],
        x[2] * xc[1] * y[2] - x[1] * xc[1] * y[1],
    ];
    big.iter().map(|t| t.norm_sqr()).sum::<f64>() + 3.0 * small.iter().map(|t| t.norm_sqr()).sum::<f64>()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PaperWitnessReport {
    pub alpha_grid: Vec<f64>,
    /// Largest `|Tr[Wρ_α] − (3−α)/7|` over the grid.
    pub trace_formula_residual: f64,
    pub sos_samples: usize,
    /// Largest `|terms − 2⟨xy|W|xy⟩⟨x|x⟩|`, the identity as displayed.
    pub sos_residual_as_displayed: f64,
    /// Largest `|terms − 4⟨xy|W|xy⟩⟨x|x⟩|`.
    pub sos_residual_factor_four: f64,
    pub product_min: f64,
}

/// Regression checks of the explicit witness: the closed-form value on
/// `ρ_α`, the displayed sum-of-squares identity and the product minimum.
pub fn paper_witness_regression(sos_samples: usize, seed: u64) -> Result<PaperWitnessReport> {
    let w = paper_witness();
    let alpha_grid: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
    let mut trace_res: f64 = 0.0;
    for &alpha in &alpha_grid {
        let rho = crate::zoo::rho_alpha(alpha)?.rho;
        trace_res = trace_res.max((rho.matrix().trace_product_re(&w) - (3.0 - alpha) / 7.0).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut res2, mut res4): (f64, f64) = (0.0, 0.0);
    for _ in 0..sos_samples {
        let x: Vec<Complex64> = (0..3).map(|_| c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
        let y: Vec<Complex64> = (0..3).map(|_| c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
        let terms = paper_sos_terms(&x, &y);
        let form = w.expectation(&kron_vec(&x, &y)).re * vec_norm(&x).powi(2);
        res2 = res2.max((terms - 2.0 * form).abs());
        res4 = res4.max((terms - 4.0 * form).abs());
    }
    let product_min = verify_on_products(&w, 3, 3, SEESAW_STARTS, seed)?.min_value;
    Ok(PaperWitnessReport {
        alpha_grid,
        trace_formula_residual: trace_res,
        sos_samples,
        sos_residual_as_displayed: res2,
        sos_residual_factor_four: res4,
        product_min,
    })
}
