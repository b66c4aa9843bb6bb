use std::io;

use thiserror::Error;

/// Errors raised while designing or measuring a waveform.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The desired PSD integrates to zero, so no group delay can be fitted.
    #[error("degenerate PSD: {0}")]
    Degenerate(String),

    /// The autocorrelation decays without a local minimum before T/2.
    #[error("no null found in the autocorrelation before lag {max_lag_s:e} s")]
    NoNull { max_lag_s: f64 },

    /// The mainlobe never falls below the -3 dB threshold.
    #[error("autocorrelation never drops below the -3 dB threshold")]
    NoMainlobeEdge,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True when the error stems from invalid user input rather than I/O.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Csv(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
