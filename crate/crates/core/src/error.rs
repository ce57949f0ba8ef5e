//! Error types shared by the whole crate.

use alloc::string::String;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors produced by tensor operations, MDP validation, and the solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands disagree on a dimension that must match.
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// An allocation or enumeration would exceed the configured cap.
    Capacity { requested: u128, cap: u128 },
    /// A factor matrix has (numerically) zero Frobenius norm.
    DegenerateFactor { mode: usize },
    /// The reference tensor of a normalized error is zero.
    ZeroReference,
    /// An input contained NaN or infinite entries.
    InvalidValue(&'static str),
    /// Factor norms exceeded the divergence guard during stochastic updates.
    Divergence { norm: f64 },
    /// A configuration or serialized object failed validation.
    Invalid(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch {
                what,
                expected,
                got,
            } => write!(f, "shape mismatch in {what}: expected {expected}, got {got}"),
            Error::Capacity { requested, cap } => {
                write!(f, "capacity exceeded: {requested} elements requested, cap is {cap}")
            }
            Error::DegenerateFactor { mode } => {
                write!(f, "factor for mode {mode} has zero Frobenius norm")
            }
            Error::ZeroReference => write!(f, "reference tensor has zero Frobenius norm"),
            Error::InvalidValue(what) => write!(f, "non-finite value in {what}"),
            Error::Divergence { norm } => {
                write!(f, "factor norms diverged (total norm {norm:e})")
            }
            Error::Invalid(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

/// A solver abort that still carries whatever progress was recorded.
///
/// Iterative solvers return this instead of a bare [`Error`] so callers can
/// inspect the trace up to the failing sweep or transition.
#[derive(Debug, Clone)]
pub struct Abort<T> {
    pub error: Error,
    pub partial: T,
}

impl<T> Abort<T> {
    pub fn new(error: Error, partial: T) -> Self {
        Abort { error, partial }
    }
}

impl<T: fmt::Debug> fmt::Display for Abort<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "solver aborted: {}", self.error)
    }
}
