//! File formats, the run pipeline and reports behind the `srpath` binary.

pub mod formats;
pub mod pipeline;

/// Process-level failure classes; each maps to a stable exit code so
/// scripts can tell bad invocations from bad inputs from broken internals.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Flag or argument misuse.
    #[error("{0}")]
    Usage(String),
    /// Unreadable, unparsable or invalid input data.
    #[error("{0}")]
    Input(String),
    /// A self-check failed after computation; the run must not be trusted.
    #[error("{0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Verify(_) => 3,
        }
    }

    pub fn input(e: impl std::fmt::Display) -> CliError {
        CliError::Input(e.to_string())
    }
}
