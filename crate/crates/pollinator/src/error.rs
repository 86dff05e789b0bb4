use std::process::ExitCode;

/// Why a command failed. Validation failures exit with 2, everything else
/// with 1.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("validation failed:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
    #[error("{0}")]
    Runtime(String),
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Failure::Validation(vec![message.into()])
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Validation(_) => ExitCode::from(2),
            Failure::Runtime(_) => ExitCode::from(1),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Core errors come from bad inputs (unknown ids, empty datasets, invalid
/// parameters), so they map to validation failures.
impl From<pollinator_core::Error> for Failure {
    fn from(e: pollinator_core::Error) -> Self {
        Failure::validation(e.to_string())
    }
}
