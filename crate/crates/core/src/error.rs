use thiserror::Error;

/// Errors raised by the decomposition, detection, and cleaning stages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("monotonic component: fewer than 2 extrema of each kind")]
    MonotonicComponent,

    #[error("invalid samples: non-finite value at index {0}")]
    InvalidSamples(usize),

    #[error("degenerate signal: {0}")]
    DegenerateSignal(&'static str),

    #[error("segment too short: [{start}, {end}] is shorter than {min_len}")]
    SegmentTooShort {
        start: usize,
        end: usize,
        min_len: usize,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("subset explosion: {0} IMFs exceeds the power-set limit of 20")]
    SubsetExplosion(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks that every sample is finite, returning the first offending index otherwise.
pub(crate) fn ensure_finite(samples: &[f64]) -> Result<()> {
    match samples.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::InvalidSamples(i)),
        None => Ok(()),
    }
}
