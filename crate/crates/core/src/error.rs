use alloc::string::String;
use core::fmt;

/// Errors shared by every solver module in this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An operand had zero rows or columns.
    EmptyOperand,
    /// Operand shapes do not line up; the message names the operation.
    DimMismatch(&'static str),
    /// A scalar parameter was outside its allowed range; the message says which.
    InvalidParam(&'static str),
    /// Block selection was asked to rank candidates against an all-zero residual.
    ZeroResidual,
    /// A sparsity profile that must be nonempty was empty.
    EmptyProfile,
    /// K is outside the valid range for the problem at hand.
    KOutOfRange { k: usize, n: usize },
    /// A real-valued solver was handed complex data; the message names the
    /// reduction to apply first.
    NotRealValued { solver: &'static str, reduction: &'static str },
    /// No cone solver adapter is configured for the SOCP path.
    AdapterMissing,
    /// The configured cone solver adapter ran but did not return a usable point.
    AdapterFailure(String),
    /// An iterative kernel broke down (division by a vanishing quantity).
    NumericalBreakdown(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyOperand => write!(f, "empty operand"),
            Error::DimMismatch(ctx) => write!(f, "dimension mismatch in {ctx}"),
            Error::InvalidParam(what) => write!(f, "invalid parameter: {what}"),
            Error::ZeroResidual => write!(f, "cannot select a block against a zero residual"),
            Error::EmptyProfile => write!(f, "sparsity profile is empty"),
            Error::KOutOfRange { k, n } => {
                write!(f, "K = {k} is outside the valid range for N = {n} blocks")
            }
            Error::NotRealValued { solver, reduction } => {
                write!(f, "{solver} is a real-valued solver; apply the {reduction} reduction first")
            }
            Error::AdapterMissing => write!(f, "adapter missing: no cone solver is configured"),
            Error::AdapterFailure(msg) => write!(f, "cone solver adapter failed: {msg}"),
            Error::NumericalBreakdown(what) => write!(f, "numerical breakdown in {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
