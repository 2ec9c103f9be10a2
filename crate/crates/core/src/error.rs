use thiserror::Error;

/// Errors produced by the denoising pipeline and its I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("unsupported WFDB format {0} (only 212 is supported)")]
    UnsupportedFormat(u32),

    #[error("truncated data: expected {expected} bytes, found {found}")]
    TruncatedData { expected: usize, found: usize },

    #[error("non-numeric cell {cell:?} at row {row}, column {column}")]
    NonNumericCell {
        row: usize,
        column: usize,
        cell: String,
    },

    #[error("ragged row {row}: expected {expected} columns, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("invalid filter specification: {0}")]
    InvalidFilter(String),

    #[error("input too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("need at least {needed} beats, got {got}")]
    TooFewBeats { needed: usize, got: usize },

    #[error("phase length {n_phase} is shorter than beat length {n_time}")]
    PhaseTooShort { n_phase: usize, n_time: usize },

    #[error("singular Gramian: time sample {0} receives no phase sample")]
    SingularGramian(usize),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("noise variance has not been estimated or supplied")]
    NoiseVarianceUnset,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
