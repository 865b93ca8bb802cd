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
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unknown label `{0}` (expected `spam` or `ham`)")]
    UnknownLabel(String),
    #[error("message {0} has no label")]
    Unlabeled(usize),
    #[error("class {label} has {count} messages, fewer than k = {k}")]
    ClassTooSmall {
        label: crate::corpus::Label,
        count: usize,
        k: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("rules file line {line}: {message}")]
    Rule { line: usize, message: String },
    #[error("empty document list")]
    EmptyDocuments,
    #[error("training set contains a single class")]
    SingleClass,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vector was built from vocabulary {found}, model expects {expected}")]
    FingerprintMismatch { expected: String, found: String },
    #[error("the rule baseline classifies raw text, not feature vectors")]
    RawTextRequired,
    #[error("{0} has no messages; rates are undefined")]
    EmptyClass(&'static str),
    #[error("fold {0} lacks one of the two classes")]
    DegenerateFold(usize),
    #[error("unsupported model format version {found} (this build reads version {expected})")]
    UnsupportedVersion { found: u64, expected: u64 },
    #[error("model file: {0}")]
    ModelFormat(String),
}
