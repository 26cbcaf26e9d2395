use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("position {x} m is outside the valid range [{min}, {max}] m")]
    OutOfRange { x: f64, min: f64, max: f64 },

    #[error("undamped resonance in mode {mode}: excitation {excitation} rad/s meets the natural frequency")]
    UndampedResonance { mode: usize, excitation: f64 },

    #[error("quadrature step {step} s exceeds the limit {limit} s")]
    StepTooCoarse { step: f64, limit: f64 },

    #[error("numerical instability: {0}")]
    Instability(String),

    #[error("no axle is ever on the span")]
    AxleNeverOnSpan,

    #[error("series of length {len} is shorter than the required {required} samples")]
    SeriesTooShort { len: usize, required: usize },

    #[error("at least {required} baseline runs are required, got {got}")]
    TooFewRuns { required: usize, got: usize },

    #[error("sensor sets differ between runs: {0}")]
    SensorMismatch(String),

    #[error("no irregularity detected: no sensor exceeds its threshold")]
    NoDetection,

    #[error("baseline configuration contains {0} bump(s); refusing to calibrate on a contaminated track")]
    ContaminatedBaseline(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown plot kind `{0}`")]
    UnknownPlotKind(String),

    #[error("missing artifact {0}")]
    MissingArtifact(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
