use thiserror::Error;

/// Errors raised by the hazardlab library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Arguments are individually valid but inconsistent with each other or
    /// with the chosen variant.
    #[error("argument error: {0}")]
    Argument(String),

    /// The requested configuration is recognised but explicitly not supported.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// No closed-form asymptotic regime is recorded for this kernel/intensity pair.
    #[error("no cataloged regime for {kernel} with {intensity}")]
    NotCataloged { kernel: String, intensity: String },

    /// An integral that must be finite diverged numerically.
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// The truncation error of the simulated measure exceeds the allowed budget.
    #[error("truncation budget exceeded: {0}")]
    TruncationBudget(String),

    /// A hypothesis of a comparison or verification routine does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Two computations that must agree did not.
    #[error("internal consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($arg:tt)+) => {
        if !($cond) {
            return Err($crate::error::Error::$variant(format!($($arg)+)));
        }
    };
}

pub(crate) use ensure;
