use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("degenerate metric at {location}: {detail}")]
    DegenerateMetric { location: String, detail: String },

    #[error("invalid metric spec `{token}`: {reason}")]
    MetricSpec { token: String, reason: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid resolution {0}: need at least 4 nodes per axis")]
    Resolution(usize),

    #[error("non-finite integrand at node {node} ({location})")]
    NonFinite { node: usize, location: String },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
