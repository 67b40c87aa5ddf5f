use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or input; exit code 1.
    #[error("{0}")]
    Validation(String),

    /// Simulation failed while running; exit code 2.
    #[error("{0}")]
    Runtime(String),

    /// Exit code 3.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, e: csv::Error) -> Self {
        let path = path.into();
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(source) => CliError::Io { path, source },
                _ => unreachable!("checked is_io_error"),
            }
        } else {
            CliError::Validation(format!("{}: {e}", path.display()))
        }
    }
}

impl From<qjump_core::Error> for CliError {
    fn from(e: qjump_core::Error) -> Self {
        use qjump_core::Error as E;
        match e {
            E::IntegrationDiverged { .. }
            | E::TooManyDivergences(..)
            | E::DegenerateRecord
            | E::SeriesLengthMismatch(_) => CliError::Runtime(e.to_string()),
            E::InvalidDimension(_)
            | E::DimensionMismatch { .. }
            | E::InvalidParameter { .. }
            | E::Domain(_)
            | E::UndefinedSteadyState => CliError::Validation(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
