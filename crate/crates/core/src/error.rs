use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty corpus: {0}")]
    EmptyCorpus(String),

    #[error("unknown label {label:?}")]
    UnknownLabel { label: String },

    #[error("invalid class spec: {0}")]
    InvalidClassSpec(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("contamination: augmented item {item} cites {source_id}, which belongs to the {split} split")]
    Contamination {
        item: String,
        source_id: String,
        split: &'static str,
    },

    #[error(transparent)]
    Gateway(#[from] crate::llm::GatewayError),

    #[error("prompt error: {0}")]
    Prompt(String),

    #[error("no numbered items found in response")]
    ParseFailure,

    #[error("diversity: {0}")]
    Diversity(String),

    #[error("statistics: {0}")]
    Stats(String),

    #[error("training: {0}")]
    Training(String),

    #[error("config: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
