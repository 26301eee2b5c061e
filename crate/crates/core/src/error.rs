use thiserror::Error;

/// Errors raised by the geometry, sampling, placement and transport layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector norm {norm:e} is below 1e-9 and cannot be normalized")]
    DegenerateVector { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exact area is not available for this region: {0}")]
    UnsupportedExactArea(String),

    #[error("degenerate probe region with area {0}; invariance needs 0 < area < 1")]
    DegenerateProbe(f64),

    #[error("matching capacity exceeded: {sources} sources but only {targets} targets")]
    Capacity { sources: usize, targets: usize },

    #[error("cap cover with angular radius {theta} could not be verified after {attempts} attempts")]
    CoverConstruction { theta: f64, attempts: usize },

    #[error("transport precondition failed: {0}")]
    TransportPrecondition(String),

    #[error("transport round {round} failed after {retries} retries: {reason}")]
    RoundFailed {
        round: usize,
        retries: usize,
        reason: String,
    },

    #[error("region file: {0}")]
    RegionFile(String),

    #[error("unknown point-set preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
