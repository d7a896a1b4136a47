use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input.
    Input,
    /// A documented size/complexity guard was exceeded.
    Guard,
    /// An internal invariant failed. Always a bug.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid integer token {token:?} at position {position}")]
    InvalidToken { token: String, position: usize },
    #[error("empty permutation")]
    EmptyPermutation,
    #[error("not a bijection: value {value} at index {index} is out of range 1..={len}")]
    OutOfRange { value: i64, index: usize, len: usize },
    #[error("not a bijection: repeated value {value} at index {index}")]
    RepeatedValue { value: usize, index: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("pattern length {k} exceeds permutation length {n}")]
    PatternTooLong { k: usize, n: usize },
    #[error("coordinate {value} outside [0, 1]")]
    CoordinateOutOfRange { value: String },
    #[error("inverted bounds: {low} > {high}")]
    InvertedBounds { low: String, high: String },
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid rational {0:?}")]
    InvalidRational(String),
    #[error("invalid permuton spec: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("line {line}: {source}")]
    AtLine { line: usize, source: Box<Error> },
}

impl Error {
    /// Tags an error with a 1-based input line.
    pub fn at_line(self, line: usize) -> Self {
        Error::AtLine { line, source: Box::new(self) }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Guard(_) => ErrorKind::Guard,
            Error::Internal(_) => ErrorKind::Internal,
            Error::AtLine { source, .. } => source.kind(),
            _ => ErrorKind::Input,
        }
    }
}
