//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Error)]
pub enum Error {
    /// A geometric or analytic domain violation (e.g. coincident positions,
    /// a quadrature node on top of a singularity).
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested computation exceeds a configured size cap.
    #[error("size error: {0}")]
    Size(String),

    /// An iterative numeric procedure failed to converge or produced
    /// non-finite values.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A value fails its type invariants.
    #[error("validation error: {0}")]
    Validation(String),

    /// The optimizer hit a non-finite objective or an inconsistent setup.
    #[error("optimization error: {0}")]
    Optimization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn size(msg: impl Into<String>) -> Self {
        Error::Size(msg.into())
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
    pub fn optimization(msg: impl Into<String>) -> Self {
        Error::Optimization(msg.into())
    }
}
