use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of an input file could not be tokenized.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input was well-formed text but violates the format's rules.
    #[error("format error{}: {message}", line_suffix(*.line))]
    Format { line: Option<usize>, message: String },

    /// A graph stream deletes an edge that is not live.
    #[error("stream consistency error on update {index}: {message}")]
    StreamConsistency { index: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Exhaustive enumeration would exceed the configured cap.
    #[error("oracle too large: {required} candidates exceeds cap {cap}")]
    OracleTooLarge { required: u128, cap: u64 },

    #[error("incompatible sketches: {0}")]
    IncompatibleSketch(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn line_suffix(line: Option<usize>) -> String {
    match line {
        Some(l) => format!(" on line {l}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format { line: Some(line), message: message.into() }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
