use thiserror::Error;

/// Errors reported by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("state is in {found} representation, expected {expected}")]
    RepresentationMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    #[error("CFL number {cfl:.6} exceeds 1; pass the override flag to run anyway")]
    CflViolation { cfl: f64 },

    #[error("usage: {0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
