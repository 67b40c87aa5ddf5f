//! Fixtures shared by the benchmarks.

use num_complex::Complex64;
use qjump_core::{build_operator_set, DensityMatrix, InitialState, OperatorSet, QubitInit, SimParams};

/// Default parameters at truncation `fock_dim`, with the resonator near
/// its locked amplitude.
pub fn fixture(fock_dim: usize) -> (SimParams, OperatorSet, DensityMatrix) {
    let params = SimParams {
        fock_dim,
        ..SimParams::default()
    };
    let ops = build_operator_set(fock_dim).expect("fock_dim >= 2");
    let rho = InitialState {
        alpha: Complex64::new(0.0, 2.0),
        qubit: QubitInit::Superposition,
    }
    .prepare(fock_dim)
    .expect("valid initial state");
    (params, ops, rho)
}
