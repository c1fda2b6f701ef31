use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("truncation: {0}")]
    Truncation(String),
    #[error("sup norm {sup} is not below 1")]
    SupNorm { sup: f64 },
    #[error("inadmissible configuration: {0}")]
    Inadmissible(String),
    #[error("grid mismatch: {0}")]
    Mismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
