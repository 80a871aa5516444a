use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("point is behind the camera (camera-frame depth {depth})")]
    BehindCamera { depth: f64 },
    #[error("degenerate box: {0}")]
    DegenerateBox(String),
    #[error("training error: {0}")]
    Training(String),
    #[error("index {index} out of range (len {len})")]
    Index { index: usize, len: usize },
    #[error("{path}: {field}: {msg}")]
    File {
        path: PathBuf,
        field: String,
        msg: String,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
