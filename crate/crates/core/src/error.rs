use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("channel is not samplable (moments-only description)")]
    NotSamplable,

    #[error("operation needs the fading distribution, but only moments are known")]
    MomentsOnly,

    #[error("moment generating function diverges at theta = {theta} (boundary {theta_max})")]
    DivergentMgf { theta: f64, theta_max: f64 },

    #[error("no Nakagami shape matches K = {k_linear} (target must lie in (0, 1))")]
    NoMatchingShape { k_linear: f64 },

    #[error("constellation has no decoding regions")]
    NoRegions,

    #[error("invalid constellation: {0}")]
    InvalidConstellation(String),

    #[error("root finding failed: {0}")]
    RootNotFound(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
