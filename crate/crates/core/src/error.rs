//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A coefficient matrix produced a non-finite entry or violated ellipticity.
    #[error("invalid coefficient field: {0}")]
    InvalidField(String),

    /// The principal square root was requested at z = 0.
    #[error("square root domain error: z = 0")]
    SqrtAtZero,

    /// The principal square root was requested on the open negative real axis.
    /// The regime hypotheses guarantee Re zeta > 0 wherever the root is used,
    /// so hitting the cut signals a parameter violation upstream.
    #[error("branch cut hit: z is real negative")]
    BranchCut,

    /// An operation precondition (support, grid, regime) was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Weight parameters fail the admissibility condition or a calibration floor.
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    /// Malformed run configuration.
    #[error("config error: {0}")]
    Config(String),

    /// An ensemble operation was called with no members.
    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
