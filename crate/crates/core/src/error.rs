use std::io;

use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph has {n} vertices, above the cap of {cap} for {operation}")]
    SizeCapExceeded {
        operation: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("giant component has {size} vertices; at least 2 are needed to sample pairs")]
    GiantTooSmall { size: usize },

    #[error("numerical failure in {operation}: {reason}")]
    Numerical {
        operation: &'static str,
        reason: String,
    },

    #[error("malformed {format} input: {reason}")]
    Format { format: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau > 2.0 && tau < 3.0 {
        Ok(())
    } else {
        Err(invalid("tau", format!("{tau} is outside the open interval (2, 3)")))
    }
}
