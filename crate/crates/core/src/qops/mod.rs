//! Operator algebra on the truncated Fock space, the qubit, and their
//! tensor product; density matrices and expectation values.

mod matrix;
mod operators;
mod sparse;
mod state;

pub use matrix::ComplexMatrix;
pub use operators::{
    build_operator_set, pauli_x, pauli_y, pauli_z, sigma_minus, sigma_plus, tensor, OperatorSet,
};
pub use sparse::SparseMatrix;
pub(crate) use state::hermitize_and_normalize_in_place;
pub use state::{
    coherent_state, coherent_truncation_ok, expectation, hermitize_and_normalize, DensityMatrix,
    StateDiagnostics, HERMITICITY_TOL, POSITIVITY_TOL, TRACE_GUARD, TRACE_TOL,
};
