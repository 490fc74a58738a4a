//! Crate-wide error type.

/// Errors produced by the statistical and numerical routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The data cannot support the requested statistic (no events, one group, ...).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// A weight function produced a zero-variance statistic.
    #[error("degenerate weight: {0}")]
    DegenerateWeight(String),

    /// A matrix argument violates a structural requirement (symmetry, PSD, shape).
    #[error("matrix error: {0}")]
    Matrix(String),

    /// A root bracket does not contain a sign change.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// A numerical routine failed to converge or met a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A name lookup (weight set, test, hazard case) failed.
    #[error("unknown name: {0}")]
    UnknownName(String),

    /// Malformed external input (CSV rows, scenario files, power matrices).
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
