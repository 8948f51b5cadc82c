use thiserror::Error;

/// Errors raised while synthesizing pulses, building models or integrating.
#[derive(Debug, Error)]
pub enum Error {
    #[error("time {t:e} s lies outside the protocol window [0, {end:e}] s")]
    Domain { t: f64, end: f64 },

    #[error("drive amplitude vanishes at t = {t:e} s; the dressing angle is singular there")]
    Singular { t: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("peak drive amplitude {peak:.6e} rad/s exceeds the limit {limit:.6e} rad/s")]
    AmplitudeExceeded { peak: f64, limit: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("integration diverged at t = {t:e} s (drift {drift:.3e}); use a smaller step")]
    Diverged { t: f64, drift: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
