use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or argument lies outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A transform argument lies outside the convergence strip of the transform.
    #[error("divergence: {what} at argument {arg} (convergence strip {strip})")]
    Divergence {
        what: String,
        arg: f64,
        strip: String,
    },

    /// The requested operation is not defined for this family.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A numerical procedure failed to reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Malformed user input (spec strings, expressions, grids).
    #[error("invalid input: {0}")]
    Input(String),

    /// A result would overflow the representable range.
    #[error("range error: {0}")]
    Range(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}

macro_rules! input {
    ($($arg:tt)*) => { $crate::error::Error::Input(format!($($arg)*)) };
}

pub(crate) use domain;
pub(crate) use input;
