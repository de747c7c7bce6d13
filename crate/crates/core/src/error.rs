use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A target or observation point coincides with a radiating element.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// The sampling grid is too coarse or too small for the requested integral.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    /// Every receiver panel faces away from the beam.
    #[error("no receiver panel is visible to the beam")]
    NoVisiblePanel,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
