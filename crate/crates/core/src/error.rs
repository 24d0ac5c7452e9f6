//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix, bias, input vector, or inter-layer shape does not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Networks passed to a parallelization do not share one depth.
    #[error("depth mismatch: {0}")]
    DepthMismatch(String),

    /// Networks passed to a parallelization or weighted sum do not share one
    /// architecture.
    #[error("architecture mismatch: {0}")]
    ArchMismatch(String),

    /// A matrix expected to be symmetric is not, beyond tolerance.
    #[error("matrix not symmetric: {0}")]
    NotSymmetric(String),

    /// A matrix expected to be positive definite has a non-positive eigenvalue.
    #[error("matrix not positive definite: {0}")]
    NotSpd(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A closed-form reference was asked for parameters it does not cover.
    #[error("unsupported reference kind: {0}")]
    UnsupportedKind(String),

    /// Building the requested network would exceed the parameter budget.
    #[error("not materializable: {0}")]
    NotMaterializable(String),

    /// The per-step network families violate the complexity growth assumption.
    #[error("complexity assumption violated at delta={delta}: {detail}")]
    AssumptionViolated { delta: f64, detail: String },

    #[error("config error: {0}")]
    ConfigParse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
