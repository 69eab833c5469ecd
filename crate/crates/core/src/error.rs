use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed key in triple {index}: {reason}")]
    MalformedKey { index: usize, reason: &'static str },

    #[error("arithmetic overflow while combining values")]
    Overflow,

    #[error("invalid cut schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("batch index {index} out of range (stream has {num_batches} batches)")]
    BatchOutOfRange { index: usize, num_batches: usize },

    #[error("vertex id {0} does not fit in a dotted-quad key")]
    KeyFormatOverflow(u64),

    #[error("too few samples for a degree fit: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("degenerate degree distribution: {0}")]
    Degenerate(&'static str),

    #[error("cannot aggregate an empty set of worker records")]
    EmptyAggregate,

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("worker {index} failed: {message}")]
    Worker { index: usize, message: String },

    #[error("verification failed for worker {index}: {detail}")]
    Verification { index: usize, detail: String },

    #[error("sweep failed at {workers} workers: {source}")]
    Sweep {
        workers: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors caused by bad parameters rather than bad data.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::InvalidSchedule(_)
            | Error::InvalidConfig(_)
            | Error::BatchOutOfRange { .. }
            | Error::KeyFormatOverflow(_) => true,
            Error::Sweep { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}
