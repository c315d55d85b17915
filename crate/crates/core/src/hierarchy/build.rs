//! Construction of the extension SDPs in both parametrizations.

use num_complex::Complex64;

use super::{ExtensionMode, Level};
use crate::error::{Error, Result};
use crate::linalg::{c, partial_transpose, r, CMatrix, TensorStructure};
use crate::sdp::{CoefMatrix, SdpBlock, SdpProblem};
use crate::state::{
    binomial, build_basis, copy_positions, expand_operator, split_symmetric_isometry, DensityMatrix, OperatorBasis,
};

/// Largest extension space handled.
pub const MAX_EXTENSION_DIM: usize = 512;
/// Largest total number of copies handled.
pub const MAX_COPIES: usize = 4;

type Entries = Vec<(usize, usize, Complex64)>;

/// Orthonormal basis of `n×n` Hermitian matrices under `Re Tr[XY]`:
/// `E_ii`, then `(E_ij + E_ji)/√2` and `i(E_ij − E_ji)/√2` for `i < j`.
fn hermitian_basis(n: usize) -> Vec<Entries> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: Vec<Entries> = (0..n).map(|i| vec![(i, i, r(1.0))]).collect();
    for i in 0..n {
        for j in i + 1..n {
            out.push(vec![(i, j, r(h)), (j, i, r(h))]);
            out.push(vec![(i, j, c(0.0, h)), (j, i, c(0.0, -h))]);
        }
    }
    out
}

fn coords(basis: &[Entries], m: &CMatrix) -> Vec<f64> {
    basis
        .iter()
        .map(|e| e.iter().map(|&(p, q, v)| (v * m[(q, p)]).re).sum())
        .collect()
}

fn from_coords(basis: &[Entries], n: usize, x: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for (e, &xi) in basis.iter().zip(x) {
        if xi != 0.0 {
            for &(p, q, v) in e {
                m[(p, q)] += v * xi;
            }
        }
    }
    m
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One positivity block: the copies whose partial transpose it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockInfo {
    /// Number of A copies transposed.
    pub a: usize,
    /// Number of B copies transposed.
    pub b: usize,
    /// Layout positions transposed.
    pub transposed: Vec<usize>,
    pub dim: usize,
}

impl BlockInfo {
    pub fn label(&self) -> String {
        match (self.a, self.b) {
            (0, 0) => "T_none".into(),
            (a, 0) => format!("T_A{a}"),
            (0, b) => format!("T_B{b}"),
            (a, b) => format!("T_A{a}B{b}"),
        }
    }
}

/// Meaning of the SDP variables.
#[derive(Debug, Clone, PartialEq)]
pub enum VariableMap {
    /// Variable `v` is the coefficient `ρ̃_{ijk}` of `σ_i ⊗ σ_j ⊗ σ_k` (and its
    /// swapped partner), zero-based basis indices with `1 ≤ i ≤ k`.
    SwapTriples(Vec<(usize, usize, usize)>),
    /// Variable `v` is the coordinate of `M` along the v-th null vector of the
    /// marginal map, with `M` acting on a symmetric space of dimension
    /// `sym_dim`.
    SymmetricNullSpace { sym_dim: usize, count: usize },
}

#[derive(Debug, Clone)]
enum Parametrization {
    Swap {
        ba: OperatorBasis,
        bb: OperatorBasis,
        triples: Vec<(usize, usize, usize)>,
    },
    Symmetric(Box<SymmetricData>),
}

#[derive(Debug, Clone)]
struct SymmetricData {
    v: CMatrix,
    supports: Vec<CMatrix>,
    herm: Vec<Entries>,
    ab_basis: Vec<Entries>,
    /// Orthonormal rows spanning the row space of the marginal map.
    q1: Vec<Vec<f64>>,
    /// Lower-triangular factor with `L = T·Q1`.
    t: Vec<Vec<f64>>,
    null: Vec<Vec<f64>>,
}

impl SymmetricData {
    /// `M₀` with `Tr_extra[V M₀ V†] = op`.
    fn particular(&self, op: &CMatrix) -> CMatrix {
        let b = coords(&self.ab_basis, op);
        let mut w = vec![0.0; b.len()];
        for s in 0..b.len() {
            let acc = b[s] - dot(&self.t[s][..s], &w[..s]);
            w[s] = acc / self.t[s][s];
        }
        let mut mu = vec![0.0; self.herm.len()];
        for (ws, q) in w.iter().zip(&self.q1) {
            for (m, qv) in mu.iter_mut().zip(q) {
                *m += ws * qv;
            }
        }
        from_coords(&self.herm, self.v.cols(), &mu)
    }
}

/// A hierarchy level bound to a state: the SDP and the maps needed to read
/// its dual.
#[derive(Debug, Clone)]
pub struct ExtensionTest {
    rho: DensityMatrix,
    level: Level,
    mode: ExtensionMode,
    problem: SdpProblem,
    variable_map: VariableMap,
    blocks: Vec<BlockInfo>,
    ext: TensorStructure,
    param: Parametrization,
}

impl ExtensionTest {
    /// Builds the test for `level`, defaulting to the swap-symmetric form at
    /// (2,1) and the fully symmetric form elsewhere.
    pub fn build(rho: &DensityMatrix, level: Level, mode: Option<ExtensionMode>) -> Result<Self> {
        let mode = mode.unwrap_or(if level == Level::new(2, 1) {
            ExtensionMode::SwapSymmetric
        } else {
            ExtensionMode::FullySymmetric
        });
        match mode {
            ExtensionMode::SwapSymmetric if level == Level::new(2, 1) => build_21(rho),
            ExtensionMode::SwapSymmetric => Err(Error::InvalidArgument(format!(
                "the swap-symmetric parametrization exists only at level (2,1), not {level}"
            ))),
            ExtensionMode::FullySymmetric => build_kl(rho, level.k, level.l),
        }
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn mode(&self) -> ExtensionMode {
        self.mode
    }

    pub fn problem(&self) -> &SdpProblem {
        &self.problem
    }

    pub fn m(&self) -> usize {
        self.problem.m()
    }

    pub fn variable_map(&self) -> &VariableMap {
        &self.variable_map
    }

    pub fn block_map(&self) -> &[BlockInfo] {
        &self.blocks
    }

    pub fn extension_structure(&self) -> &TensorStructure {
        &self.ext
    }

    /// The ρ-dependent part of the extension for an arbitrary Hermitian
    /// operator on `H_A ⊗ H_B` in place of ρ. This is linear in `op`, and
    /// partial-tracing the result over the extra copies returns `op`.
    pub fn fixed_extension(&self, op: &CMatrix) -> Result<CMatrix> {
        let n = self.rho.dim();
        if !op.is_square() || op.rows() != n {
            return Err(Error::DimensionMismatch(format!("operator of dimension {} for a {n}-dim state", op.rows())));
        }
        match &self.param {
            Parametrization::Swap { ba, bb, .. } => {
                let co = expand_operator(op, ba, bb)?;
                let mut out = CMatrix::zeros(self.ext.total_dim(), self.ext.total_dim());
                let s0a = ba.element(0);
                for i in 0..ba.len() {
                    for j in 0..bb.len() {
                        let v = co.get(i, j);
                        if v == 0.0 {
                            continue;
                        }
                        let sj = bb.element(j);
                        if i == 0 {
                            out.axpy_real(v, &s0a.kron(sj).kron(s0a));
                        } else {
                            let si = ba.element(i);
                            out.axpy_real(v, &si.kron(sj).kron(s0a));
                            out.axpy_real(v, &s0a.kron(sj).kron(si));
                        }
                    }
                }
                Ok(out)
            }
            Parametrization::Symmetric(data) => Ok(data.v.congruence(&data.particular(op))),
        }
    }

    /// Extension-space operator multiplying variable `i`.
    pub fn variable_operator(&self, i: usize) -> CMatrix {
        match &self.param {
            Parametrization::Swap { ba, bb, triples } => {
                let (a, j, k) = triples[i];
                let sj = bb.element(j);
                let mut out = ba.element(a).kron(sj).kron(ba.element(k));
                if a != k {
                    out.axpy_real(1.0, &ba.element(k).kron(sj).kron(ba.element(a)));
                }
                out
            }
            Parametrization::Symmetric(data) => {
                data.v.congruence(&from_coords(&data.herm, data.v.cols(), &data.null[i]))
            }
        }
    }

    /// `ρ̃(x)`: the fixed part plus `Σ xᵢ` times the variable operators.
    pub fn extension_from_variables(&self, x: &[f64]) -> Result<CMatrix> {
        if x.len() != self.m() {
            return Err(Error::DimensionMismatch(format!("{} variables, expected {}", x.len(), self.m())));
        }
        let mut out = self.fixed_extension(self.rho.matrix())?;
        match &self.param {
            Parametrization::Symmetric(data) => {
                let mut mu = vec![0.0; data.herm.len()];
                for (xi, nv) in x.iter().zip(&data.null) {
                    for (m, v) in mu.iter_mut().zip(nv) {
                        *m += xi * v;
                    }
                }
                out.axpy_real(1.0, &data.v.congruence(&from_coords(&data.herm, data.v.cols(), &mu)));
            }
            Parametrization::Swap { .. } => {
                for (i, &xi) in x.iter().enumerate() {
                    if xi != 0.0 {
                        out.axpy_real(xi, &self.variable_operator(i));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Variable values reproducing a given extension of ρ. The extension must
    /// carry the symmetry of the parametrization.
    pub fn variables_for_extension(&self, ext: &CMatrix) -> Result<Vec<f64>> {
        let n = self.ext.total_dim();
        if !ext.is_square() || ext.rows() != n {
            return Err(Error::DimensionMismatch(format!("extension of dimension {}, expected {n}", ext.rows())));
        }
        match &self.param {
            Parametrization::Swap { ba, bb, triples } => {
                let scale = (ba.dim() * ba.dim() * bb.dim()) as f64;
                Ok(triples
                    .iter()
                    .map(|&(i, j, k)| {
                        let op = ba.element(i).kron(bb.element(j)).kron(ba.element(k));
                        scale * ext.trace_product_re(&op)
                    })
                    .collect())
            }
            Parametrization::Symmetric(data) => {
                let m = data.v.adjoint().congruence(ext);
                let mu = coords(&data.herm, &m);
                let mu0 = coords(&data.herm, &data.particular(self.rho.matrix()));
                let diff: Vec<f64> = mu.iter().zip(&mu0).map(|(a, b)| a - b).collect();
                Ok(data.null.iter().map(|nv| dot(nv, &diff)).collect())
            }
        }
    }

    /// Maps an extension-space operator into each block:
    /// compression onto the block support after its partial transpose.
    pub fn block_operators(&self, x: &CMatrix) -> Result<Vec<CMatrix>> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(b, info)| {
                let pt = partial_transpose(x, &self.ext, &info.transposed)?;
                Ok(match &self.param {
                    Parametrization::Swap { .. } => pt,
                    Parametrization::Symmetric(data) => data.supports[b].adjoint().congruence(&pt).hermitian_part(),
                })
            })
            .collect()
    }

    /// Each dual block mapped back to the extension space before its
    /// partial transpose: `W_b Z_b W_b†`. These stay PSD when `Z_b` is.
    pub fn lift_parts(&self, z: &[CMatrix]) -> Result<Vec<CMatrix>> {
        if z.len() != self.blocks.len() {
            return Err(Error::DimensionMismatch(format!("{} blocks, expected {}", z.len(), self.blocks.len())));
        }
        self.blocks
            .iter()
            .zip(z)
            .enumerate()
            .map(|(b, (info, zb))| {
                if zb.rows() != info.dim || !zb.is_square() {
                    return Err(Error::DimensionMismatch(format!(
                        "block {b} has dimension {}, expected {}",
                        zb.rows(),
                        info.dim
                    )));
                }
                Ok(match &self.param {
                    Parametrization::Swap { .. } => zb.clone(),
                    Parametrization::Symmetric(data) => data.supports[b].congruence(zb),
                })
            })
            .collect()
    }

    /// Adjoint of [`Self::block_operators`]: `Y = Σ_b (W_b Z_b W_b†)^{T_{I_b}}`.
    pub fn lift(&self, z: &[CMatrix]) -> Result<CMatrix> {
        let n = self.ext.total_dim();
        let mut y = CMatrix::zeros(n, n);
        for (info, part) in self.blocks.iter().zip(self.lift_parts(z)?) {
            y.axpy_real(1.0, &partial_transpose(&part, &self.ext, &info.transposed)?);
        }
        Ok(y)
    }
}

fn check_scale(d_a: usize, d_b: usize, k: usize, l: usize) -> Result<()> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidArgument(format!("level ({k},{l}) needs k, l >= 1")));
    }
    if k + l > MAX_COPIES {
        return Err(Error::Sizing(format!("level ({k},{l}) has more than {MAX_COPIES} copies")));
    }
    let dim = d_a.pow(k as u32) * d_b.pow(l as u32);
    if dim > MAX_EXTENSION_DIM {
        return Err(Error::Sizing(format!("extension space of dimension {dim} exceeds {MAX_EXTENSION_DIM}")));
    }
    Ok(())
}

fn assemble(
    fixed: &CMatrix,
    variables: impl Iterator<Item = CMatrix>,
    test: &ExtensionTest,
) -> Result<SdpProblem> {
    let f0 = test.block_operators(fixed)?;
    let mut f: Vec<Vec<CoefMatrix>> = vec![Vec::new(); f0.len()];
    for op in variables {
        for (fb, m) in f.iter_mut().zip(test.block_operators(&op)?) {
            fb.push(CoefMatrix::from_dense(m));
        }
    }
    let m = f[0].len();
    let blocks = f0.into_iter().zip(f).map(|(f0, f)| SdpBlock::new(f0.hermitian_part(), f)).collect();
    SdpProblem::new(vec![0.0; m], blocks)
}

/// Level (2,1) with only the A-copy swap symmetry imposed, parametrized by
/// the coefficients `ρ̃_{ijk}` of `σ_i ⊗ σ_j ⊗ σ_k`.
pub fn build_21(rho: &DensityMatrix) -> Result<ExtensionTest> {
    let (d_a, d_b) = (rho.dim_a(), rho.dim_b());
    check_scale(d_a, d_b, 2, 1)?;
    let ba = build_basis(d_a)?;
    let bb = build_basis(d_b)?;
    let ext = TensorStructure::extension(d_a, d_b, 2, 1)?;
    let n = ext.total_dim();
    let mut triples = Vec::new();
    for i in 1..ba.len() {
        for j in 0..bb.len() {
            for k in i..ba.len() {
                triples.push((i, j, k));
            }
        }
    }
    let blocks = vec![
        BlockInfo { a: 0, b: 0, transposed: vec![], dim: n },
        BlockInfo { a: 1, b: 0, transposed: vec![0], dim: n },
        BlockInfo { a: 0, b: 1, transposed: vec![1], dim: n },
    ];
    let mut test = ExtensionTest {
        rho: rho.clone(),
        level: Level::new(2, 1),
        mode: ExtensionMode::SwapSymmetric,
        problem: SdpProblem::new(vec![], vec![SdpBlock::new(CMatrix::zeros(1, 1), vec![])])?,
        variable_map: VariableMap::SwapTriples(triples.clone()),
        blocks,
        ext,
        param: Parametrization::Swap { ba, bb, triples },
    };
    let fixed = test.fixed_extension(rho.matrix())?;
    let ops: Vec<CMatrix> = (0..test.variable_count()).map(|i| test.variable_operator(i)).collect();
    test.problem = assemble(&fixed, ops.into_iter(), &test)?;
    Ok(test)
}

/// Level (k,l) with the extension restricted to
/// `Sym^k(H_A) ⊗ Sym^l(H_B)`: `ρ̃ = V M V†`, with the marginal condition
/// solved exactly so the free variables span its null space.
pub fn build_kl(rho: &DensityMatrix, k: usize, l: usize) -> Result<ExtensionTest> {
    let (d_a, d_b) = (rho.dim_a(), rho.dim_b());
    check_scale(d_a, d_b, k, l)?;
    let ext = TensorStructure::extension(d_a, d_b, k, l)?;
    let n = ext.total_dim();
    let v = split_symmetric_isometry(d_a, d_b, k, l, 0, 0)?;
    let sym = v.cols();
    let herm = hermitian_basis(sym);
    let n_ab = d_a * d_b;
    let ab_basis = hermitian_basis(n_ab);
    let extra = n / n_ab;

    // Rows of the marginal map: coordinates of V†(B_s ⊗ I)V.
    let rows: Vec<Vec<f64>> = ab_basis
        .iter()
        .map(|bs| {
            let mut ks = CMatrix::zeros(sym, sym);
            for &(p, q, val) in bs {
                for e in 0..extra {
                    let vp = v.row(p * extra + e);
                    let vq = v.row(q * extra + e);
                    for (alpha, a) in vp.iter().enumerate() {
                        if *a == crate::linalg::ZERO {
                            continue;
                        }
                        let coef = a.conj() * val;
                        for (beta, bq) in vq.iter().enumerate() {
                            ks[(alpha, beta)] += coef * bq;
                        }
                    }
                }
            }
            coords(&herm, &ks)
        })
        .collect();

    // Modified Gram-Schmidt with one reorthogonalization: rows = T·Q1.
    let mut q1: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    let mut t = vec![vec![0.0; rows.len()]; rows.len()];
    for (s, row) in rows.iter().enumerate() {
        let mut w = row.clone();
        for _ in 0..2 {
            for (u, q) in q1.iter().enumerate() {
                let proj = dot(&w, q);
                t[s][u] += proj;
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= proj * b);
            }
        }
        let norm = dot(&w, &w).sqrt();
        if norm < 1e-10 {
            return Err(Error::InvalidArgument(format!("marginal map is rank deficient at level ({k},{l})")));
        }
        t[s][s] = norm;
        q1.push(w.into_iter().map(|a| a / norm).collect());
    }

    // Complete Q1 to an orthonormal basis, always taking the unit vector
    // with the largest residual next.
    let total = herm.len();
    let count = total - q1.len();
    let mut resid: Vec<f64> = (0..total).map(|i| 1.0 - q1.iter().map(|q| q[i] * q[i]).sum::<f64>()).collect();
    let mut null: Vec<Vec<f64>> = Vec::with_capacity(count);
    for _ in 0..count {
        let pivot = (0..total).max_by(|&a, &b| resid[a].total_cmp(&resid[b])).expect("non-empty");
        let mut w = vec![0.0; total];
        w[pivot] = 1.0;
        for _ in 0..2 {
            for q in q1.iter().chain(null.iter()) {
                let proj = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= proj * b);
            }
        }
        let norm = dot(&w, &w).sqrt();
        let w: Vec<f64> = w.into_iter().map(|a| a / norm).collect();
        for (rv, wv) in resid.iter_mut().zip(&w) {
            *rv -= wv * wv;
        }
        resid[pivot] = f64::NEG_INFINITY;
        null.push(w);
    }

    let (a_pos, b_pos) = copy_positions(k, l);
    let mut blocks = Vec::new();
    let mut supports = Vec::new();
    for a in 0..=k {
        for b in 0..=l {
            if (a, b) > (k - a, l - b) {
                continue;
            }
            let w = split_symmetric_isometry(d_a, d_b, k, l, a, b)?;
            let mut transposed: Vec<usize> = a_pos[..a].iter().chain(&b_pos[..b]).copied().collect();
            transposed.sort_unstable();
            blocks.push(BlockInfo { a, b, transposed, dim: w.cols() });
            supports.push(w);
        }
    }
    debug_assert_eq!(blocks.len(), ((k + 1) * (l + 1)).div_ceil(2));
    debug_assert_eq!(count, binomial(d_a + k - 1, k).pow(2) * binomial(d_b + l - 1, l).pow(2) - n_ab * n_ab);

    let data = SymmetricData { v, supports, herm, ab_basis, q1, t, null };
    let mut test = ExtensionTest {
        rho: rho.clone(),
        level: Level::new(k, l),
        mode: ExtensionMode::FullySymmetric,
        problem: SdpProblem::new(vec![], vec![SdpBlock::new(CMatrix::zeros(1, 1), vec![])])?,
        variable_map: VariableMap::SymmetricNullSpace { sym_dim: sym, count },
        blocks,
        ext,
        param: Parametrization::Symmetric(Box::new(data)),
    };
    let fixed = test.fixed_extension(rho.matrix())?;
    let ops: Vec<CMatrix> = (0..count).map(|i| test.variable_operator(i)).collect();
    test.problem = assemble(&fixed, ops.into_iter(), &test)?;
    Ok(test)
}

impl ExtensionTest {
    fn variable_count(&self) -> usize {
        match &self.variable_map {
            VariableMap::SwapTriples(t) => t.len(),
            VariableMap::SymmetricNullSpace { count, .. } => *count,
        }
    }
}
