use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("power target {target:.6} not reached within coefficient cap {cap} (achieved fraction {achieved:.6})")]
    NonConvergence {
        achieved: f64,
        target: f64,
        cap: usize,
    },

    #[error("too few samples for {kernel} reconstruction: got {got}, need at least {need}")]
    TooFewSamples {
        kernel: &'static str,
        got: usize,
        need: usize,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("access codebook size {n_ac} is below the coverage lower bound {bound}")]
    BelowBound { n_ac: usize, bound: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
