use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("non-finite value in {component} at {index:?}")]
    NonFinite {
        component: &'static str,
        index: Vec<usize>,
    },

    #[error(
        "integration blew up at t = {time}: max |entry| = {max_magnitude} at flat offset {offset}"
    )]
    Blowup {
        time: f64,
        max_magnitude: f64,
        offset: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
