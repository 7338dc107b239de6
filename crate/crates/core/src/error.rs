use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("{path}: {source}")]
    Path {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("malformed WARC record: {0}")]
    RecordMalformed(String),

    #[error("unexpected end of input: {0}")]
    UnexpectedEof(String),

    #[error("text too short for language detection ({0} non-whitespace characters, need 20)")]
    TextTooShort(usize),

    #[error("no language profiles loaded (need at least 2, got {0})")]
    NoProfiles(usize),

    #[error("vocabulary is empty after min_count filtering")]
    EmptyVocabulary,

    #[error("invalid word frequency {0}; must be in (0, 1]")]
    InvalidFrequency(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("duplicate word {0:?}")]
    DuplicateWord(String),

    #[error("out-of-vocabulary word {0:?}")]
    OovWord(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("too few points: {points} points for {clusters} clusters")]
    TooFewPoints { points: usize, clusters: usize },

    #[error("perplexity {perplexity} too large for {points} points (max {max})")]
    PerplexityTooLarge {
        perplexity: f64,
        points: usize,
        max: f64,
    },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("training labels contain a single class")]
    DegenerateLabels,
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn path(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Path {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
