use thiserror::Error;

/// Errors produced by the sampling pipeline and its analysis tools.
#[derive(Debug, Error)]
pub enum Error {
    #[error("signal evaluated to non-finite value {value} at k={index}")]
    NonFinite { index: usize, value: f64 },

    #[error("sample {value} at k={index} lies outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("radius {radius} is below the grid spacing {spacing}")]
    Resolution { radius: f64, spacing: f64 },

    #[error("empty signal")]
    Empty,

    #[error("corrupt event train: {0}")]
    Corrupt(String),

    #[error("synthesis failed: {0}")]
    Synthesis(String),

    #[error("degenerate estimate: {0}")]
    Degenerate(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("realization failed for H={hurst}, j={j}, seed={seed}: {source}")]
    Realization {
        hurst: f64,
        j: u32,
        seed: u64,
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(line: usize, msg: impl Into<String>) -> Self {
        Error::Config {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
