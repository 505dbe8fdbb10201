use std::fmt;

/// Errors reported by the evaluation, verdict, and scan routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the operation's domain (q, z, x, or tol).
    Domain(String),
    /// A structurally invalid argument: empty list, non-monotone sequence,
    /// malformed grid specification.
    Argument(String),
    /// n = 0 where the Turan expression needs the (n-1)-remainder.
    Index(String),
    /// Two evaluation routes disagreed beyond their combined error bounds.
    CrossCheck(String),
    /// An index shift produced a non-positive remainder; the accumulated
    /// numerical error is reported instead of being clamped away.
    NonPositive(String),
    /// The iteration cap was reached before the tail bound converged.
    Convergence(String),
    /// A CSV record or header failed to parse.
    Parse(String),
    /// An I/O failure while reading or writing scan files.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Argument(m) => write!(f, "argument error: {m}"),
            Error::Index(m) => write!(f, "index error: {m}"),
            Error::CrossCheck(m) => write!(f, "cross-check failed: {m}"),
            Error::NonPositive(m) => write!(f, "non-positive remainder: {m}"),
            Error::Convergence(m) => write!(f, "convergence failure: {m}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
