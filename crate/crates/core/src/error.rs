use thiserror::Error;

use crate::metric::SpaceId;

pub type Result<T, E = GeomError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    /// A point was handed to a space it does not belong to.
    #[error("point of space {found} used with space {expected}")]
    SpaceMismatch { expected: SpaceId, found: SpaceId },

    #[error("geodesic not unique: distance {distance} reaches uniqueness radius {radius}")]
    NonUniqueGeodesic { distance: f64, radius: f64 },

    #[error("{op} is not available on {kind} backends")]
    Capability { op: &'static str, kind: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("precondition violated: {message} (witness: {witness})")]
    Precondition { message: String, witness: String },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("below numerical resolution: {0}")]
    Resolution(String),
}

impl GeomError {
    pub fn capability(op: &'static str, kind: impl ToString) -> Self {
        GeomError::Capability {
            op,
            kind: kind.to_string(),
        }
    }

    pub fn precondition(message: impl Into<String>, witness: impl Into<String>) -> Self {
        GeomError::Precondition {
            message: message.into(),
            witness: witness.into(),
        }
    }

    pub fn is_precondition(&self) -> bool {
        matches!(self, GeomError::Precondition { .. })
    }
}
