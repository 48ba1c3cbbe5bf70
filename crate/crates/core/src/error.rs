use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid template set: {0}")]
    InvalidTemplateSet(String),

    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),

    #[error("invalid universe: n = {n} is smaller than arity k = {k}")]
    InvalidUniverse { n: usize, k: usize },

    #[error("invalid generator spec: {0}")]
    InvalidGenSpec(String),

    #[error("operation requires a boolean domain (t = 2), got t = {0}")]
    NonBooleanDomain(u8),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("input is satisfiable; operation requires an unsatisfiable formula")]
    SatisfiableInput,

    #[error("invalid proof at step {step}: {reason}")]
    InvalidProof { step: usize, reason: String },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
