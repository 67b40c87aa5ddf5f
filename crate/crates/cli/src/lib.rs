//! Configuration, run orchestration and result files for `qjump-sim`.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod run;

pub use config::{Mode, RunConfig, SweepAxis, ThermalBath};
pub use error::{CliError, Result};
pub use run::{run, threads_from_env};
