use std::path::PathBuf;

use rollmeasure_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(CoreError),
    #[error("numerical failure: {0}")]
    Numerical(CoreError),
    #[error("cannot write {path}: {message}")]
    Output { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Output { .. } => 1,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidSemiAxes { .. }
            | CoreError::ChartOutOfRange { .. }
            | CoreError::NonUnitGamma { .. }
            | CoreError::OffSurface { .. }
            | CoreError::InvalidStep { .. }
            | CoreError::NotAxisymmetric
            | CoreError::GridTooSmall { .. } => CliError::Input(e),
            CoreError::NonPositiveDefinite
            | CoreError::ChartMarginViolation { .. }
            | CoreError::PoleProximity { .. }
            | CoreError::NonFinite { .. } => CliError::Numerical(e),
        }
    }
}
