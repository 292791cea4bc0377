//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by kernel evaluation, quadrature, and certification.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The refinement cap was reached before two successive levels agreed.
    #[error("quadrature did not converge within {max_refinements} refinements (last delta {last_delta})")]
    NonConverged {
        max_refinements: u32,
        last_delta: String,
    },

    /// The double-run certificate failed: runs at `digits` and `digits + 15`
    /// disagree beyond 10^(-digits).
    #[error("certification failed at {digits} digits: runs differ by {diff}")]
    CertificationFailed { digits: u32, diff: String },
}

pub type Result<T> = std::result::Result<T, Error>;
