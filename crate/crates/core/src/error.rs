//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors raised by matrix operations, state constructors, measures, and the
/// roof optimizer.
#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible or invalid matrix/state dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Input violates a mathematical precondition (not Hermitian, not PSD,
    /// parameter out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value left its numerically valid window (e.g. a radicand more
    /// negative than floating noise can explain).
    #[error("numerical domain error: {0}")]
    Numerical(String),

    /// Invalid optimizer configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
