//! Canonical test states with ground-truth labels, plus seeded random
//! generators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, inner, kron_vec, min_eigenvalue, r, vec_norm, CMatrix, ZERO};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroundTruth {
    Separable,
    EntangledNpt,
    EntangledPpt,
    Unknown,
}

impl GroundTruth {
    pub fn is_entangled(self) -> Option<bool> {
        match self {
            GroundTruth::Separable => Some(false),
            GroundTruth::EntangledNpt | GroundTruth::EntangledPpt => Some(true),
            GroundTruth::Unknown => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LabeledState {
    pub rho: DensityMatrix,
    pub name: String,
    pub params: Vec<(String, f64)>,
    pub ground_truth: GroundTruth,
    /// Where the label comes from: a published region or a construction.
    pub provenance: &'static str,
}

impl LabeledState {
    /// Checks the label against the partial-transpose spectrum before
    /// returning. NPT labels need a negative eigenvalue; separable and PPT
    /// labels need none below `-1e-10`.
    fn checked(
        rho: DensityMatrix,
        name: &str,
        params: Vec<(String, f64)>,
        ground_truth: GroundTruth,
        provenance: &'static str,
    ) -> Result<Self> {
        let min = min_eigenvalue(&rho.partial_transpose_a())?;
        let consistent = match ground_truth {
            GroundTruth::EntangledNpt => min < 0.0,
            GroundTruth::Separable | GroundTruth::EntangledPpt => min >= -1e-10,
            GroundTruth::Unknown => true,
        };
        if !consistent {
            return Err(Error::InvalidState(format!(
                "{name}: label {ground_truth:?} contradicts partial-transpose eigenvalue {min:e}"
            )));
        }
        Ok(Self { rho, name: name.to_string(), params, ground_truth, provenance })
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// `name?k=v&…` label, without the `zoo:` prefix.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            return self.name.clone();
        }
        let q: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}?{}", self.name, q.join("&"))
    }
}

fn basis_vec(d: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; d];
    v[i] = r(1.0);
    v
}

fn max_entangled(d: usize) -> Vec<Complex64> {
    let s = 1.0 / (d as f64).sqrt();
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        v[i * d + i] = r(s);
    }
    v
}

/// `ρ_α = (2/7)|ψ₊⟩⟨ψ₊| + (α/7)σ₊ + ((5−α)/7)σ₋` on 3×3, where
/// `σ₊ = (|01⟩⟨01| + |12⟩⟨12| + |20⟩⟨20|)/3` and `σ₋` is its party swap.
pub fn rho_alpha(alpha: f64) -> Result<LabeledState> {
    if !(0.0..=5.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha must lie in [0, 5], got {alpha}")));
    }
    let psi = max_entangled(3);
    let mut m = CMatrix::outer(&psi, &psi).scale_real(2.0 / 7.0);
    for i in 0..3 {
        let j = (i + 1) % 3;
        m[(i * 3 + j, i * 3 + j)] += r(alpha / 21.0);
        m[(j * 3 + i, j * 3 + i)] += r((5.0 - alpha) / 21.0);
    }
    let gt = if (2.0..=3.0).contains(&alpha) {
        GroundTruth::Separable
    } else if !(1.0..=4.0).contains(&alpha) {
        GroundTruth::EntangledNpt
    } else {
        GroundTruth::EntangledPpt
    };
    LabeledState::checked(
        DensityMatrix::new(m, 3, 3)?,
        "rho_alpha",
        vec![("alpha".into(), alpha)],
        gt,
        "published regions: separable on [2,3], NPT outside [1,4]",
    )
}

/// The five orthonormal tiles product vectors on 3×3.
pub fn tiles_vectors() -> Vec<Vec<Complex64>> {
    let h = 1.0 / 2f64.sqrt();
    let e = |i| basis_vec(3, i);
    let diff = |i: usize, j: usize| {
        let mut v = vec![ZERO; 3];
        v[i] = r(h);
        v[j] = r(-h);
        v
    };
    let flat = vec![r(1.0 / 3f64.sqrt()); 3];
    vec![
        kron_vec(&e(0), &diff(0, 1)),
        kron_vec(&diff(0, 1), &e(2)),
        kron_vec(&e(2), &diff(1, 2)),
        kron_vec(&diff(1, 2), &e(0)),
        kron_vec(&flat, &flat),
    ]
}

/// Bound entangled state `(I − Σ|u_i⟩⟨u_i|)/4` from the tiles UPB.
pub fn tiles_upb_state() -> Result<LabeledState> {
    let mut m = CMatrix::identity(9);
    for u in tiles_vectors() {
        m.axpy_real(-1.0, &CMatrix::outer(&u, &u));
    }
    LabeledState::checked(
        DensityMatrix::new(m.scale_real(0.25), 3, 3)?,
        "tiles_upb",
        vec![],
        GroundTruth::EntangledPpt,
        "unextendible product basis construction",
    )
}

/// `(1−p)|ψ₊⟩⟨ψ₊| + p·I/d²`; NPT exactly when `p < d/(d+1)`.
pub fn isotropic(d: usize, p: f64) -> Result<LabeledState> {
    if d < 2 || !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("isotropic state needs d >= 2 and p in [0,1], got d={d}, p={p}")));
    }
    let psi = max_entangled(d);
    let rho = DensityMatrix::pure(&psi, d, d)?.mix_with_identity(p);
    let gt = if p < d as f64 / (d as f64 + 1.0) { GroundTruth::EntangledNpt } else { GroundTruth::Separable };
    LabeledState::checked(
        rho,
        "isotropic",
        vec![("d".into(), d as f64), ("p".into(), p)],
        gt,
        "derived from the analytic partial-transpose spectrum",
    )
}

/// `|φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell() -> Result<LabeledState> {
    LabeledState::checked(
        DensityMatrix::pure(&max_entangled(2), 2, 2)?,
        "bell",
        vec![],
        GroundTruth::EntangledNpt,
        "maximally entangled pure state",
    )
}

pub fn maximally_mixed(d_a: usize, d_b: usize) -> Result<LabeledState> {
    if d_a < 2 || d_b < 2 {
        return Err(Error::InvalidArgument("local dimensions must be >= 2".into()));
    }
    LabeledState::checked(
        DensityMatrix::maximally_mixed(d_a, d_b),
        "maximally_mixed",
        vec![("da".into(), d_a as f64), ("db".into(), d_b as f64)],
        GroundTruth::Separable,
        "product of local maximally mixed states",
    )
}

/// Normalised complex Gaussian vector, i.e. Haar-random on the unit sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d)
        .map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let n = vec_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Haar-random unitary from Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex64> = (0..d)
            .map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        for u in &cols {
            let proj = inner(u, &v);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let n = vec_norm(&v);
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    CMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Convex mixture of `terms` Haar-random pure product states with weights
/// drawn uniformly from the simplex.
pub fn random_separable(d_a: usize, d_b: usize, terms: usize, seed: u64) -> Result<LabeledState> {
    if terms == 0 {
        return Err(Error::InvalidArgument("at least one term is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<f64> = (0..terms).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut m = CMatrix::zeros(d_a * d_b, d_a * d_b);
    for w in weights {
        let x = random_unit_vector(d_a, &mut rng);
        let y = random_unit_vector(d_b, &mut rng);
        let v = kron_vec(&x, &y);
        m.axpy_real(w, &CMatrix::outer(&v, &v));
    }
    LabeledState::checked(
        DensityMatrix::new(m.hermitian_part(), d_a, d_b)?,
        "random_separable",
        vec![
            ("da".into(), d_a as f64),
            ("db".into(), d_b as f64),
            ("terms".into(), terms as f64),
            ("seed".into(), seed as f64),
        ],
        GroundTruth::Separable,
        "separable by construction",
    )
}

/// Full-rank random state `G G† / Tr(G G†)` with `G` Ginibre.
pub fn random_state(d_a: usize, d_b: usize, seed: u64) -> Result<LabeledState> {
    let n = d_a * d_b;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(n, n, |_, _| c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)));
    let m = g.matmul_adjoint(&g);
    let tr = m.trace().re;
    LabeledState::checked(
        DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part(), d_a, d_b)?,
        "random_state",
        vec![("da".into(), d_a as f64), ("db".into(), d_b as f64), ("seed".into(), seed as f64)],
        GroundTruth::Unknown,
        "no label",
    )
}

/// One-parameter families from the cited literature constructions, plus the
/// in-paper families, for parameter sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    RhoAlpha,
    Isotropic { d: usize },
    /// Horodecki 3×3 chessboard-free family, parameter `a ∈ [0,1]`.
    Horodecki3x3,
    /// Horodecki 2×4 family, parameter `b ∈ [0,1]`.
    Horodecki2x4,
}

impl Family {
    pub fn parameter(&self) -> &'static str {
        match self {
            Family::RhoAlpha => "alpha",
            Family::Isotropic { .. } => "p",
            Family::Horodecki3x3 => "a",
            Family::Horodecki2x4 => "b",
        }
    }

    pub fn range(&self) -> (f64, f64) {
        match self {
            Family::RhoAlpha => (0.0, 5.0),
            _ => (0.0, 1.0),
        }
    }

    pub fn at(&self, t: f64) -> Result<LabeledState> {
        match *self {
            Family::RhoAlpha => rho_alpha(t),
            Family::Isotropic { d } => isotropic(d, t),
            Family::Horodecki3x3 => horodecki_3x3(t),
            Family::Horodecki2x4 => horodecki_2x4(t),
        }
    }
}

pub fn load_literature_family(name: &str) -> Result<Family> {
    match name {
        "horodecki-3x3" => Ok(Family::Horodecki3x3),
        "horodecki-2x4" => Ok(Family::Horodecki2x4),
        "rho_alpha" => Ok(Family::RhoAlpha),
        _ => match name.strip_prefix("isotropic-") {
            Some(d) => d
                .parse()
                .ok()
                .filter(|&d| d >= 2)
                .map(|d| Family::Isotropic { d })
                .ok_or_else(|| Error::InvalidArgument(format!("unknown family {name}"))),
            None => Err(Error::InvalidArgument(format!("unknown family {name}"))),
        },
    }
}

fn family_label(t: f64) -> GroundTruth {
    if t > 0.0 && t < 1.0 {
        GroundTruth::EntangledPpt
    } else {
        GroundTruth::Separable
    }
}

/// `(8a+1)⁻¹` times the published 9×9 matrix; PPT entangled for `0 < a < 1`.
pub fn horodecki_3x3(a: f64) -> Result<LabeledState> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidArgument(format!("a must lie in [0,1], got {a}")));
    }
    let mut m = CMatrix::from_real_diagonal(&[a, a, a, a, a, a, (1.0 + a) / 2.0, a, (1.0 + a) / 2.0]);
    for (i, j) in [(0, 4), (0, 8), (4, 8)] {
        m[(i, j)] = r(a);
        m[(j, i)] = r(a);
    }
    let s = (1.0 - a * a).sqrt() / 2.0;
    m[(6, 8)] = r(s);
    m[(8, 6)] = r(s);
    LabeledState::checked(
        DensityMatrix::new(m.scale_real(1.0 / (8.0 * a + 1.0)), 3, 3)?,
        "horodecki-3x3",
        vec![("a".into(), a)],
        family_label(a),
        "cited construction: PPT entangled for 0 < a < 1",
    )
}

/// `(7b+1)⁻¹` times the published 8×8 matrix on 2×4; PPT entangled for
/// `0 < b < 1`.
pub fn horodecki_2x4(b: f64) -> Result<LabeledState> {
    if !(0.0..=1.0).contains(&b) {
        return Err(Error::InvalidArgument(format!("b must lie in [0,1], got {b}")));
    }
    let mut m = CMatrix::from_real_diagonal(&[b, b, b, b, (1.0 + b) / 2.0, b, b, (1.0 + b) / 2.0]);
    for (i, j) in [(0, 5), (1, 6), (2, 7)] {
        m[(i, j)] = r(b);
        m[(j, i)] = r(b);
    }
    let s = (1.0 - b * b).sqrt() / 2.0;
    m[(4, 7)] = r(s);
    m[(7, 4)] = r(s);
    LabeledState::checked(
        DensityMatrix::new(m.scale_real(1.0 / (7.0 * b + 1.0)), 2, 4)?,
        "horodecki-2x4",
        vec![("b".into(), b)],
        family_label(b),
        "cited construction: PPT entangled for 0 < b < 1",
    )
}

/// Resolves `zoo:name?key=value&…`.
pub fn from_uri(uri: &str) -> Result<LabeledState> {
    let body = uri
        .strip_prefix("zoo:")
        .ok_or_else(|| Error::Parse(format!("zoo reference must start with 'zoo:': {uri}")))?;
    let (name, query) = body.split_once('?').unwrap_or((body, ""));
    let mut params: Vec<(&str, f64)> = Vec::new();
    for pair in query.split('&').filter(|s| !s.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{pair}'")))?;
        let v: f64 = v.parse().map_err(|_| Error::Parse(format!("bad number for {k}: '{v}'")))?;
        params.push((k, v));
    }
    let get = |k: &str| params.iter().find(|(key, _)| *key == k).map(|(_, v)| *v);
    let need = |k: &str| get(k).ok_or_else(|| Error::Parse(format!("{name} requires parameter '{k}'")));
    let int = |k: &str, default: Option<usize>| -> Result<usize> {
        match get(k) {
            Some(v) if v >= 0.0 && v.fract() == 0.0 => Ok(v as usize),
            Some(v) => Err(Error::Parse(format!("{k} must be a non-negative integer, got {v}"))),
            None => default.ok_or_else(|| Error::Parse(format!("{name} requires parameter '{k}'"))),
        }
    };
    for (k, _) in &params {
        let allowed: &[&str] = match name {
            "rho_alpha" => &["alpha"],
            "isotropic" => &["d", "p"],
            "bell" | "tiles_upb" => &[],
            "maximally_mixed" => &["da", "db"],
            "random_separable" => &["da", "db", "terms", "seed"],
            "random_state" => &["da", "db", "seed"],
            "horodecki-3x3" => &["a"],
            "horodecki-2x4" => &["b"],
            _ => return Err(Error::Parse(format!("unknown zoo state '{name}'"))),
        };
        if !allowed.contains(k) {
            return Err(Error::Parse(format!("unexpected parameter '{k}' for {name}")));
        }
    }
    match name {
        "rho_alpha" => rho_alpha(need("alpha")?),
        "isotropic" => isotropic(int("d", Some(2))?, need("p")?),
        "bell" => bell(),
        "tiles_upb" => tiles_upb_state(),
        "maximally_mixed" => maximally_mixed(int("da", Some(2))?, int("db", Some(2))?),
        "random_separable" => random_separable(
            int("da", Some(2))?,
            int("db", Some(2))?,
            int("terms", Some(4))?,
            int("seed", Some(0))? as u64,
        ),
        "random_state" => random_state(int("da", Some(2))?, int("db", Some(2))?, int("seed", Some(0))? as u64),
        "horodecki-3x3" => horodecki_3x3(need("a")?),
        "horodecki-2x4" => horodecki_2x4(need("b")?),
        _ => Err(Error::Parse(format!("unknown zoo state '{name}'"))),
    }
}
