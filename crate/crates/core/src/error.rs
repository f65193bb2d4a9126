use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("horizon exceeded: {0}")]
    HorizonExceeded(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("undecidable for this backend: {0}")]
    UndecidableBackend(String),
    #[error("not a chain homotopy equivalence: {0}")]
    NotAnEquivalence(String),
    #[error("idempotent failure: {0}")]
    IdempotentFailure(String),
    #[error("degenerate form")]
    DegenerateForm,
    #[error("empty cover")]
    EmptyCover,
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),
    #[error("support escapes the configured set: {0}")]
    SupportEscape(String),
    #[error("control violation: {0}")]
    ControlViolation(String),
    #[error("homotopy convention mismatch: {0}")]
    ConventionMismatch(String),
    #[error("points live in different complexes")]
    DifferentComplex,
    #[error("sample budget exceeded: {0}")]
    SampleBudgetExceeded(String),
    #[error("identity failure: {0}")]
    IdentityFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
