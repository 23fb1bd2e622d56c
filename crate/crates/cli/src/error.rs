//! Error type with the exit-code contract: 1 for I/O and parse failures,
//! 2 for domain and precondition failures.

use std::fmt;

use posthoc_core::bounds::BoundError;
use posthoc_core::calibration::CalibrationError;
use posthoc_core::family::FamilyError;
use posthoc_core::simulation::SimulationError;

#[derive(Debug)]
pub enum CliError {
    /// Filesystem trouble; exit code 1.
    Io { path: String, source: std::io::Error },
    /// Unreadable input content; exit code 1.
    Parse { path: String, message: String },
    /// Structurally readable input that violates a precondition; exit code 2.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Io { .. } | Self::Parse { .. } => 1,
            Self::Domain(_) => 2,
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Self::Domain(message.into())
    }

    pub fn parse(path: &std::path::Path, message: impl Into<String>) -> Self {
        Self::Parse {
            path: path.display().to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io { path, source } => write!(f, "{path}: {source}"),
            Self::Parse { path, message } => write!(f, "{path}: {message}"),
            Self::Domain(message) => write!(f, "{message}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        Self::Domain(e.to_string())
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        Self::Domain(e.to_string())
    }
}

impl From<CalibrationError> for CliError {
    fn from(e: CalibrationError) -> Self {
        Self::Domain(e.to_string())
    }
}

impl From<SimulationError> for CliError {
    fn from(e: SimulationError) -> Self {
        Self::Domain(e.to_string())
    }
}
