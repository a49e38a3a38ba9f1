//! Dense complex linear algebra and quantum-state primitives for a handful of qubits.
//!
//! Tensor products follow the row-major Kronecker convention everywhere: the
//! first factor is the most significant index.

mod eigen;
mod matrix;
mod random;
mod state;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen};
pub(crate) use eigen::sym4_top_eigen;
pub use matrix::{paulis, sigma_0, sigma_x, sigma_y, sigma_z, tensor, tensor_vec, ComplexMatrix, C64};
pub(crate) use matrix::{I, ONE, ZERO};
pub use random::{
    haar_random_unitary, haar_random_unitary_with, random_density_matrix, random_pure_state,
    random_pure_state_with,
};
pub use state::{
    max_entangled_state, me_vector, partial_trace, partial_trace_matrix, partial_transpose, DensityMatrix,
    StateVector,
};

/// Tolerance for structural checks (unitarity, completeness).
pub const STRUCTURAL_TOL: f64 = 1e-10;
