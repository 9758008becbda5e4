use std::path::PathBuf;

use thiserror::Error;

use crate::geo::Miles;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("coordinate out of range: lat {lat}, lon {lon}")]
    InvalidCoordinate { lat: f64, lon: f64 },
    #[error("distance must be finite and non-negative, got {0}")]
    InvalidDistance(f64),
    #[error("unknown metric {0:?} (expected greatcircle or planar)")]
    UnknownMetric(String),

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("missing column: {0}")]
    MissingColumn(String),
    #[error("duplicate producer id: {0}")]
    DuplicateId(String),
    #[error("unknown delimiter {0:?} (expected tab or comma)")]
    UnknownDelimiter(String),

    #[error("address must not be empty")]
    EmptyAddress,
    #[error("address not in geocode cache and no resolver configured: {0}")]
    CacheMissNoResolver(String),
    #[error("geocoder failed for {address}: {cause}")]
    ResolverFailure { address: String, cause: String },

    #[error("spatial index is empty")]
    EmptyIndex,
    #[error("none of the candidate producers are in the spatial index")]
    NoCandidateInIndex,
    #[error("nearest producer is {nearest} mi away, beyond the {radius} mi radius")]
    NoProducerInRadius { nearest: Miles, radius: Miles },

    #[error("recipe has no ingredients")]
    EmptyRecipe,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("no recipe is eligible under the selected policy")]
    NoEligibleRecipe,

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
