use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Bad configuration: empty keyword list, inverted band, missing resource.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input data. `line` is 1-based when known.
    #[error("{}", match .line {
        Some(l) => format!("data error at line {l}: {msg}"),
        None => format!("data error: {msg}"),
    })]
    Data { line: Option<usize>, msg: String },

    #[error("training error: {0}")]
    Training(String),

    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("polynomial fit error: {0}")]
    Fit(String),

    #[error("undefined score: {0}")]
    UndefinedScore(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn data(line: impl Into<Option<usize>>, msg: impl Into<String>) -> Self {
        Error::Data {
            line: line.into(),
            msg: msg.into(),
        }
    }

    /// True for errors the CLI maps to the configuration exit code.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
