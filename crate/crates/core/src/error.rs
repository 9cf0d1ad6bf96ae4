use thiserror::Error;

/// Every failure the library can report.
///
/// The CLI maps these onto exit codes through [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot decide {what} within a budget of {budget} digits")]
    UndecidableAtPrecision { what: String, budget: u32 },

    #[error("value is rational but an irrational constant was required: {0}")]
    NotIrrational(String),

    #[error(
        "quadratic irrationals over different radicands cannot be combined: sqrt({0}) vs sqrt({1})"
    )]
    MixedRadicand(String, String),

    #[error("intervals overlap: {0}")]
    Overlap(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("prime bound {bound} exceeds the cap {cap}")]
    PrimeCapExceeded { bound: String, cap: u64 },

    #[error("set must be open, found a closed endpoint in {0}")]
    NotOpen(String),

    #[error("internal proof check failed: {0}")]
    InternalProofCheckFailed(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error at position {position} in {input:?}: {message}")]
    Parse {
        input: String,
        position: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(input: &str, position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            position,
            message: message.into(),
        }
    }

    /// 1 for violated preconditions, 2 for malformed input, 3 for precision
    /// and budget exhaustion.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::UndecidableAtPrecision { .. }
            | Error::BudgetExceeded(_)
            | Error::PrimeCapExceeded { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
