use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("duplicate sample for agent {agent} at tick {tick}")]
    DuplicateSample { tick: u64, agent: usize },

    #[error("sample for tick {tick} is out of order (next recordable tick is {expected})")]
    OutOfOrder { tick: u64, expected: u64 },

    #[error("unknown agent {0}")]
    UnknownAgent(usize),

    #[error("window ending at tick {end} with length {length} is not available (need {required_from}..={end} to be recorded)")]
    WarmUp { end: u64, length: u64, required_from: i64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
