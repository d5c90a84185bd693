use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error(
        "exhaustive search over {count} interconnections exceeds the cap of {cap}; \
         reduce the number of Layer-1 converters or the battery count"
    )]
    EnumerationCap { count: u128, cap: u128 },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    /// A solver result or Monte Carlo trial failed a post-hoc check. Never expected;
    /// indicates a numerical or logic fault rather than bad input.
    #[error("internal check failed: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
