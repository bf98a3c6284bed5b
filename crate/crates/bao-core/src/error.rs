use thiserror::Error;

/// Workspace-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or semantically invalid input (bad JSON shape, unknown atom
    /// names, relation arities that do not match the signature, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested operation is not defined for this representation, e.g.
    /// a full-carrier sweep over a symbolic structure with no join oracle.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A configured state-space or work budget ran out before the question
    /// was decided.
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
