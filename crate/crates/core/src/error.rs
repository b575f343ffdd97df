use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty document")]
    EmptyDocument,

    #[error("degenerate reservoir (spectral radius is zero), reseed or raise p_s")]
    DegenerateReservoir,

    #[error("singular readout system with alpha = 0, use alpha > 0")]
    SingularReadout,

    #[error("model has not been trained")]
    Untrained,

    #[error("non-finite input at index {0}")]
    NonFiniteInput(usize),

    #[error("NRMSE undefined for zero-mean series; z-scoring the target is disallowed for this metric")]
    ZeroMeanTarget,

    #[error("constant series")]
    ConstantSeries,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("lag {lag} out of range for series length {len}")]
    LagOutOfRange { lag: i64, len: usize },

    #[error("unknown city: {0}")]
    UnknownCity(String),

    #[error("empty date range")]
    EmptyRange,

    #[error("series do not share feature and date range")]
    MismatchedSeries,

    #[error("trajectory left (0,1) at step {step}")]
    Diverged { step: usize },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
