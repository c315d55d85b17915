//! Copy-permutation symmetry on the extension space `A B A… B…`.

use crate::error::{Error, Result};
use crate::linalg::{factor_permutation, CMatrix, TensorStructure};

/// Layout positions of the A copies and B copies in the extension layout.
pub fn copy_positions(k: usize, l: usize) -> (Vec<usize>, Vec<usize>) {
    let mut a = vec![0];
    a.extend((1..k).map(|i| 1 + i));
    let mut b = vec![1];
    b.extend((1..l).map(|j| k + j));
    (a, b)
}

/// Permutation operator on `H_A^{⊗k} ⊗ H_B^{⊗l}` (extension layout) that moves
/// the factor at position `p` to position `perm[p]`. Only like parties may be
/// exchanged.
pub fn swap_operator(d_a: usize, d_b: usize, k: usize, l: usize, perm: &[usize]) -> Result<CMatrix> {
    let ts = TensorStructure::extension(d_a, d_b, k, l)?;
    if perm.len() != ts.len() {
        return Err(Error::InvalidArgument(format!(
            "permutation of length {} for {} factors",
            perm.len(),
            ts.len()
        )));
    }
    for (p, &q) in perm.iter().enumerate() {
        if q >= ts.len() || ts.labels()[p] != ts.labels()[q] {
            return Err(Error::InvalidArgument(format!(
                "permutation {perm:?} mixes A and B copies"
            )));
        }
    }
    factor_permutation(ts.dims(), perm)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Projector onto the subspace symmetric under every permutation of A copies
/// and of B copies, computed as the group average of the permutation
/// operators.
pub fn symmetrizer(d_a: usize, d_b: usize, k: usize, l: usize) -> Result<CMatrix> {
    let ts = TensorStructure::extension(d_a, d_b, k, l)?;
    let (a_pos, b_pos) = copy_positions(k, l);
    let n = ts.total_dim();
    let mut acc = CMatrix::zeros(n, n);
    let a_perms = permutations(&a_pos);
    let b_perms = permutations(&b_pos);
    let count = (a_perms.len() * b_perms.len()) as f64;
    for pa in &a_perms {
        for pb in &b_perms {
            let mut perm = vec![0; ts.len()];
            for (src, dst) in a_pos.iter().zip(pa) {
                perm[*src] = *dst;
            }
            for (src, dst) in b_pos.iter().zip(pb) {
                perm[*src] = *dst;
            }
            acc.axpy_real(1.0 / count, &factor_permutation(ts.dims(), &perm)?);
        }
    }
    Ok(acc)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn multisets(d: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..d {
        for tail in multisets(d, k - 1) {
            if tail.first().is_none_or(|&t| t >= first) {
                let mut v = vec![first];
                v.extend(tail);
                out.push(v);
            }
        }
    }
    out
}

/// Real isometry `Sym^k(C^d) → (C^d)^{⊗k}`; columns are normalised
/// symmetrised basis states, one per multiset in lexicographic order.
pub fn symmetric_isometry(d: usize, k: usize) -> CMatrix {
    let sets = multisets(d, k);
    let total = d.pow(k as u32);
    let mut v = CMatrix::zeros(total, sets.len());
    for (col, set) in sets.iter().enumerate() {
        let mut hits = Vec::new();
        for idx in 0..total {
            let mut digits = Vec::with_capacity(k);
            let mut rem = idx;
            for _ in 0..k {
                digits.push(rem % d);
                rem /= d;
            }
            digits.sort_unstable();
            if &digits == set {
                hits.push(idx);
            }
        }
        let w = 1.0 / (hits.len() as f64).sqrt();
        for idx in hits {
            v[(idx, col)] = crate::linalg::r(w);
        }
    }
    v
}

/// Isometry onto `Sym^{a}⊗Sym^{k-a}` of the A copies tensored with
/// `Sym^{b}⊗Sym^{l-b}` of the B copies, embedded in the extension layout.
/// The first `a` A copies and first `b` B copies form the leading groups.
///
/// With `a = b = 0` this is the embedding of the fully symmetric subspace.
pub fn split_symmetric_isometry(
    d_a: usize,
    d_b: usize,
    k: usize,
    l: usize,
    a: usize,
    b: usize,
) -> Result<CMatrix> {
    if a > k || b > l {
        return Err(Error::InvalidArgument(format!("split ({a},{b}) exceeds ({k},{l})")));
    }
    let grouped = symmetric_isometry(d_a, a)
        .kron(&symmetric_isometry(d_a, k - a))
        .kron(&symmetric_isometry(d_b, b))
        .kron(&symmetric_isometry(d_b, l - b));
    // Grouped layout is A^k B^l; move each copy to its extension position.
    let (a_pos, b_pos) = copy_positions(k, l);
    let mut dims = vec![d_a; k];
    dims.extend(vec![d_b; l]);
    let perm: Vec<usize> = a_pos.into_iter().chain(b_pos).collect();
    Ok(factor_permutation(&dims, &perm)?.matmul(&grouped))
}
