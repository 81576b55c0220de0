// Copyright 2026 qsl Contributors
// SPDX-License-Identifier: Apache-2.0

use qsl_core::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Numerical(String),

    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 0 success, 1 check failure, 2 config error, 3 numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::ChecksFailed { .. } => 1,
            Self::Config(_) | Self::Io { .. } => 2,
            Self::Numerical(_) => 3,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io { path: path.as_ref().display().to_string(), source }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::InvalidState(_)
            | Error::InvalidSchedule(_)
            | Error::Dimension(_)
            | Error::NotHermitian { .. } => Self::Config(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

/// Short machine-readable tag for a failed sweep point.
pub fn status_tag(e: &Error) -> &'static str {
    match e {
        Error::NoRelaxation { .. } => "no_relaxation",
        Error::InfeasibleUpperBracket { .. } => "infeasible_upper_bracket",
        Error::ZeroDenominator => "zero_denominator",
        Error::Divergent => "divergent",
        Error::InvalidParameter(_)
        | Error::InvalidState(_)
        | Error::InvalidSchedule(_)
        | Error::Dimension(_)
        | Error::NotHermitian { .. } => "invalid_parameter",
        _ => "numerical_failure",
    }
}
