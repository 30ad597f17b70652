use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to
/// print a one-line diagnostic.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("d must be > 1, got {0}")]
    InvalidDiscriminant(i64),
    #[error("zero element where a nonzero one is required")]
    ZeroElement,
    #[error("zero ideal")]
    ZeroIdeal,
    #[error("ideal {0} does not divide {1}")]
    NotDivisible(String, String),
    #[error("element {0} is not invertible modulo {1}")]
    NotInvertible(String, String),
    #[error("{what}: size {size} exceeds budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        size: String,
        budget: u64,
    },
    #[error("principal generator search exceeded budget {budget} for ideal {ideal}")]
    SearchBudgetExceeded { ideal: String, budget: u64 },
    #[error("membership violated: {0}")]
    MembershipViolated(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("divisor ideal {0} is not principal")]
    NonPrincipalDivisor(String),
    #[error("{0} is not integral")]
    NotIntegral(String),
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("integer {0} is outside the supported range")]
    OutOfRange(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
