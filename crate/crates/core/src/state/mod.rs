//! Quantum-state data model: bipartite density matrices, the Hermitian
//! operator basis, product vectors, and copy-permutation symmetry.

mod basis;
mod density;
mod symmetry;

pub use basis::{build_basis, expand, expand_operator, reconstruct, Coefficients, OperatorBasis};
pub use density::{product_state_value, DensityMatrix, ProductVector, POSITIVITY_TOL, TRACE_TOL};
pub use symmetry::{binomial, copy_positions, split_symmetric_isometry, swap_operator, symmetric_isometry, symmetrizer};
