//! Error type shared by the whole crate.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two operands belong to different rings (or polynomial variable sets).
    RingMismatch { expected: String, found: String },
    /// The ring cannot support the requested operation (e.g. enumerating an
    /// infinite ring, or deciding zero divisors where no procedure exists).
    UnsupportedRing(String),
    /// A malformed value or out-of-range argument.
    InvalidInput(String),
    /// The coefficient ring has the wrong characteristic for the operation.
    CharMismatch(String),
    /// The operation requires a multilinear polynomial.
    NotMultilinear(String),
    /// A sweep or expansion would exceed the configured budget.
    BudgetExceeded(String),
    /// Exact division failed (inexact quotient, zero-divisor pivot, or an
    /// element outside the expected span).
    DivisionFailed(String),
    /// Syntax error with a byte position into the input.
    Parse { pos: usize, msg: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::RingMismatch { expected, found } => {
                write!(f, "ring mismatch: expected {expected}, found {found}")
            }
            Error::UnsupportedRing(msg) => write!(f, "unsupported ring: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::CharMismatch(msg) => write!(f, "characteristic mismatch: {msg}"),
            Error::NotMultilinear(msg) => write!(f, "not multilinear: {msg}"),
            Error::BudgetExceeded(msg) => write!(f, "budget exceeded: {msg}"),
            Error::DivisionFailed(msg) => write!(f, "exact division failed: {msg}"),
            Error::Parse { pos, msg } => write!(f, "syntax error at byte {pos}: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
