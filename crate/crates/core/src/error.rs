use thiserror::Error;

/// Errors shared by every layer of the crate.
///
/// Outcomes that are results rather than failures (a truncated census, a
/// closure that hits its cap, a failed screen, graded-series violations)
/// are never reported through this type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed words, unknown labels, letters outside an expected alphabet.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// The file parsed but a field is missing, unknown, or of the wrong shape.
    #[error("schema violation: {0}")]
    Schema(String),

    /// The data is well-formed but does not describe a group (non-inverse
    /// pairs, singular matrices, inconsistent tables).
    #[error("mathematical inconsistency: {0}")]
    Inconsistent(String),

    /// A conjugation, action, or coset table lacks an entry the computation needs.
    #[error("presentation invalid: {0}")]
    PresentationInvalid(String),

    /// A step or size budget was exhausted.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
