//! Conditioned and unconditioned integrators, measurement records and the
//! seeded noise source.

mod oracle;
mod planes;
mod rng;
mod stepper;
mod trajectory;

pub use oracle::{lindblad_evolve, lindblad_evolve_with, DampingTreatment, LindbladGenerator};
pub use rng::{derive_seed, gaussian_stream, GaussianStream};
pub use stepper::{sme_step, SmeStepper, StepInfo, StepOutput};
pub use trajectory::{
    simulate_trajectory, simulate_trajectory_observed, simulate_trajectory_with_ops, TrajectoryRecord,
};
