use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors raised by the engines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    InvalidArgument(String),
    /// A correlator outside the available coverage.
    MissingKey(String),
    /// A DR-type correlator in positive genus with no table loaded.
    TableRequired(String),
    Unsupported(String),
    TruncationOverflow(String),
    /// Overdetermined solve was inconsistent; carries the offending coefficients.
    NoMatch { residual: Vec<String> },
    Underdetermined(String),
    Inconsistent(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(s) => write!(f, "invalid argument: {s}"),
            Error::MissingKey(s) => write!(f, "missing correlator: {s}"),
            Error::TableRequired(s) => write!(f, "table required: {s}"),
            Error::Unsupported(s) => write!(f, "unsupported: {s}"),
            Error::TruncationOverflow(s) => write!(f, "truncation overflow: {s}"),
            Error::NoMatch { residual } => write!(f, "no match ({} inconsistent coefficients)", residual.len()),
            Error::Underdetermined(s) => write!(f, "underdetermined: {s}"),
            Error::Inconsistent(s) => write!(f, "inconsistent: {s}"),
        }
    }
}

#[cfg(feature = "parallel")]
impl std::error::Error for Error {}
