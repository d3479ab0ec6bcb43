//! Error taxonomy shared across the library.
//!
//! Precondition violations (bad exponents, malformed vectors, missing
//! hypotheses) are kept distinct from estimation failures so that callers
//! can map them to different exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Space descriptor fails validation (q <= 0, nonpositive weights, ...).
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    /// Vector fails canonical-form validation.
    #[error("invalid vector: {0}")]
    InvalidVector(String),

    /// Matrix descriptor fails validation.
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// Analysis configuration fails validation.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A stated hypothesis of the requested operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Intermediate value left the representable range.
    #[error("range error at index {index}: {message}")]
    Range { index: usize, message: String },

    /// Koethe dual is only available for unweighted and weighted Lq, q in [1, inf].
    #[error("unsupported Koethe dual: {0}")]
    UnsupportedDual(String),

    /// Column of the generating matrix vanishes on the probed range.
    #[error("column {j} of {name} is identically zero on [1, {n}]")]
    ZeroColumn { name: String, j: usize, n: usize },

    /// An estimation routine could not produce a usable bracket.
    #[error("estimation failed: {0}")]
    Estimation(String),

    /// A reference oracle disagrees with the algorithm it checks.
    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
