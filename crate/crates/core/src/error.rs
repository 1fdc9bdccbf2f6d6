//! Crate-wide error type.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All fallible operations in this crate report one of these variants.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },

    #[error("invalid label at line {line}: expected 0 or 1, got {value}")]
    InvalidLabel { line: usize, value: String },

    #[error("duplicate document id `{id}` at line {line}")]
    DuplicateId { id: String, line: usize },

    #[error("corpus `{name}` mixes labeled and unlabeled documents")]
    MixedLabels { name: String },

    #[error("corpus `{name}` is not labeled")]
    UnlabeledCorpus { name: String },

    #[error("corpus `{name}` is empty")]
    EmptyCorpus { name: String },

    #[error("split fraction must lie in (0, 1), got {0}")]
    InvalidFraction(f64),

    #[error("{0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("undefined on empty text")]
    EmptyText,

    #[error("lexicon `{name}` is empty after parsing")]
    EmptyLexicon { name: String },

    #[error("training data contains a single class; both classes are required")]
    SingleClass,

    #[error("archive section `{section}`: {message}")]
    Archive { section: String, message: String },

    #[error(
        "archive format version {found} is not supported (this build reads version {supported})"
    )]
    ArchiveVersion { found: u16, supported: u16 },

    #[error("ablation row `{row}` failed: {source}")]
    AblationRow {
        row: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
