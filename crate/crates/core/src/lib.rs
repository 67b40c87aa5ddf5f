//! Quantum-trajectory simulation of a continuously measured nanomechanical
//! resonator coupled to a Cooper-pair box, with state-based feedback.
//!
//! The resonator is truncated to `fock_dim` levels and the joint state is a
//! dense `2N x 2N` density matrix, qubit factor first. Conditioned
//! evolution is in [`sme`], the feedback laws in [`control`], and phase /
//! jump statistics in [`analysis`].

pub mod analysis;
pub mod control;
pub mod ensemble;
pub mod error;
pub mod model;
pub mod qops;
pub mod sme;

pub use analysis::{
    detect_jumps, occupancy_comparison, phase_of, record_diagnostics, Branch, JumpDetector, JumpStatistics,
    OccupancyReport, Phase, RecordDiagnostics,
};
pub use control::{momentum_damping_hamiltonian, qubit_feedback_hamiltonian, QubitFeedbackSetting};
pub use ensemble::{ensemble_mean, run_ensemble, EnsembleMean, EnsembleResult};
pub use error::{Error, Result};
pub use model::{
    effective_rates, hamiltonian_at, steady_state_prediction, thermal_measurement_rate, InitialState,
    QubitInit, QubitNoiseModel, QubitSign, SimParams, SteadyState,
};
pub use qops::{build_operator_set, coherent_state, ComplexMatrix, DensityMatrix, OperatorSet, SparseMatrix};
pub use sme::{gaussian_stream, lindblad_evolve, simulate_trajectory, sme_step, StepOutput, TrajectoryRecord};
