use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("line {line}: malformed record: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: invalid record: {message}")]
    InvalidRecord { line: usize, message: String },

    #[error("line {line}: {message}")]
    Labels { line: usize, message: String },

    #[error("name database line {line}: {message}")]
    NameDatabase { line: usize, message: String },

    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },

    #[error("invalid image vector: {0}")]
    ImageVector(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("cannot fit preprocessor: {0}")]
    CannotFit(String),

    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    #[error("schema mismatch: expected {expected} dimensions, got {actual}")]
    SchemaMismatch { expected: usize, actual: usize },

    #[error("incompatible resources: {0}")]
    IncompatibleResources(String),

    #[error("unsupported model format version {found} (supported: {supported})")]
    ModelVersion { found: u32, supported: u32 },

    #[error("model checksum mismatch (file truncated or corrupted)")]
    Checksum,

    #[error("malformed model artifact: {0}")]
    ModelFormat(String),

    #[error("cannot build folds: {0}")]
    Folds(String),

    #[error("user {0} has a prediction but no record in the users file")]
    UnknownUser(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}
