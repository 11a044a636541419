use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("solver failure: {0}")]
    Solver(effort_contracts::Error),

    #[error("range error: {0}")]
    Range(effort_contracts::Error),
}

impl CliError {
    /// 0 success, 1 output IO, 2 config, 3 solver, 4 range.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Read { .. } => 2,
            CliError::Solver(_) => 3,
            CliError::Range(_) => 4,
            CliError::Write { .. } => 1,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<effort_contracts::Error> for CliError {
    fn from(e: effort_contracts::Error) -> Self {
        use effort_contracts::Error as E;
        match e {
            E::Range { .. } => CliError::Range(e),
            E::ExistenceViolation
            | E::BracketExceeded(_)
            | E::ConvexityViolation(_)
            | E::NotInterior
            | E::SymmetryBroken(..) => CliError::Solver(e),
            E::Domain(_)
            | E::InvalidParameter(_)
            | E::LengthMismatch { .. }
            | E::IndexOutOfRange { .. }
            | E::TooFewSensors(_)
            | E::NotSymmetric => CliError::Config(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
