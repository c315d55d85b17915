//! Tensor-product bookkeeping and the partial operations built on it.
//!
//! Factors are laid out big-endian: the first listed factor is the most
//! significant digit of the flattened index.

use serde::{Deserialize, Serialize};

use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

/// Which subsystem a tensor factor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorStructure {
    dims: Vec<usize>,
    labels: Vec<Party>,
}

impl TensorStructure {
    pub fn new(dims: Vec<usize>, labels: Vec<Party>) -> Result<Self> {
        if dims.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} dims but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidArgument(format!(
                "tensor factors must have dimension >= 2, got {dims:?}"
            )));
        }
        Ok(Self { dims, labels })
    }

    pub fn bipartite(d_a: usize, d_b: usize) -> Result<Self> {
        Self::new(vec![d_a, d_b], vec![Party::A, Party::B])
    }

    /// Extension layout `A B A … A B … B` for k copies of A and l copies of B.
    ///
    /// The first two factors are the original parties, so tracing out
    /// everything after them recovers the bipartite state.
    pub fn extension(d_a: usize, d_b: usize, k: usize, l: usize) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(Error::InvalidArgument("extension needs k, l >= 1".into()));
        }
        let mut dims = vec![d_a, d_b];
        let mut labels = vec![Party::A, Party::B];
        for _ in 1..k {
            dims.push(d_a);
            labels.push(Party::A);
        }
        for _ in 1..l {
            dims.push(d_b);
            labels.push(Party::B);
        }
        Self::new(dims, labels)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[Party] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Positions of every factor carrying the given label, in layout order.
    pub fn positions_of(&self, party: Party) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == party)
            .map(|(i, _)| i)
            .collect()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    fn check_operator(&self, m: &CMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{} but tensor structure {:?} has dimension {}",
                m.rows(),
                m.cols(),
                self.dims,
                self.total_dim()
            )));
        }
        Ok(())
    }

    fn check_indices(&self, idx: &[usize]) -> Result<()> {
        for &i in idx {
            if i >= self.dims.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.dims.len(),
                });
            }
        }
        Ok(())
    }

    /// Flattened offsets of every multi-index over `factors`, enumerated in
    /// big-endian order of those factors.
    fn offsets(&self, factors: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &f in factors {
            let mut next = Vec::with_capacity(out.len() * self.dims[f]);
            for &base in &out {
                for digit in 0..self.dims[f] {
                    next.push(base + digit * strides[f]);
                }
            }
            out = next;
        }
        out
    }

    fn complement(&self, selected: &[usize]) -> Vec<usize> {
        (0..self.dims.len()).filter(|i| !selected.contains(i)).collect()
    }
}

fn sorted_unique(idx: &[usize]) -> Vec<usize> {
    let mut v = idx.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Traces out every factor not listed in `keep`; the kept factors stay in
/// layout order.
pub fn partial_trace(m: &CMatrix, ts: &TensorStructure, keep: &[usize]) -> Result<CMatrix> {
    ts.check_operator(m)?;
    ts.check_indices(keep)?;
    let keep = sorted_unique(keep);
    let traced = ts.complement(&keep);
    let keep_off = ts.offsets(&keep);
    let trace_off = ts.offsets(&traced);
    let n = keep_off.len();
    let mut out = CMatrix::zeros(n, n);
    for (r, &kr) in keep_off.iter().enumerate() {
        for (cc, &kc) in keep_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &trace_off {
                acc += m[(kr + t, kc + t)];
            }
            out[(r, cc)] = acc;
        }
    }
    Ok(out)
}

/// Transposes the listed tensor factors: `⟨i|m^T|j⟩` swaps the digits of the
/// selected factors between row and column index.
pub fn partial_transpose(m: &CMatrix, ts: &TensorStructure, parties: &[usize]) -> Result<CMatrix> {
    ts.check_operator(m)?;
    ts.check_indices(parties)?;
    let sel = sorted_unique(parties);
    let rest = ts.complement(&sel);
    let sel_off = ts.offsets(&sel);
    let rest_off = ts.offsets(&rest);
    let mut out = CMatrix::zeros(m.rows(), m.cols());
    for &ui in &rest_off {
        for &uj in &rest_off {
            for &si in &sel_off {
                for &sj in &sel_off {
                    out[(ui + sj, uj + si)] = m[(ui + si, uj + sj)];
                }
            }
        }
    }
    Ok(out)
}

/// Permutation matrix that moves factor `p` of the input layout to position
/// `perm[p]` of the output layout.
pub fn factor_permutation(dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    let n = dims.len();
    if perm.len() != n {
        return Err(Error::InvalidArgument(format!(
            "permutation of length {} for {} factors",
            perm.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let mut out_dims = vec![0; n];
    for (p, &q) in perm.iter().enumerate() {
        out_dims[q] = dims[p];
    }
    let total: usize = dims.iter().product();
    let mut in_strides = vec![1; n];
    let mut out_strides = vec![1; n];
    for i in (0..n.saturating_sub(1)).rev() {
        in_strides[i] = in_strides[i + 1] * dims[i + 1];
        out_strides[i] = out_strides[i + 1] * out_dims[i + 1];
    }
    let mut pm = CMatrix::zeros(total, total);
    for idx in 0..total {
        let mut target = 0;
        for p in 0..n {
            let digit = (idx / in_strides[p]) % dims[p];
            target += digit * out_strides[perm[p]];
        }
        pm[(target, idx)] = super::matrix::ONE;
    }
    Ok(pm)
}
