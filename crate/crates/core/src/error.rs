//! Crate-wide error type.

/// Errors reported by solvers, evaluators and estimators.
///
/// Precondition failures carry the violated bound in the message so that a
/// harness can surface it without re-deriving the check.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A point or parameter lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration (unknown family, bad parameter range, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Evaluation requested at a kernel singularity.
    #[error("singularity: {0}")]
    Singularity(String),

    /// A sampled value was non-finite or an evaluator failed internally.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// A documented hypothesis of the target operation is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Not enough usable data to produce the requested estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
