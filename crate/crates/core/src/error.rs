use thiserror::Error;

/// Errors surfaced by the library. Non-convergence of the mountain-pass
/// iteration is *not* an error; it is reported in [`crate::mountain::MountainPassResult`].
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input (bad field/grid pairing, negative t, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A root-finder or quadrature failed to converge.
    #[error("numerical failure: {0}")]
    Numerics(String),

    /// A structural hypothesis is violated and no override was requested.
    /// The message carries the violated bound.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// The functional does not exhibit mountain-pass geometry on this problem.
    #[error("geometry probe failed ({probe}): {message}")]
    Geometry { probe: &'static str, message: String },

    /// The shooting integrator found no sign change to bisect on.
    #[error("shooting oracle failed: {0}")]
    Oracle(String),

    /// Configuration file problems; the message names the offending key.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization failure: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
