use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An edit operation does not fit the string it is applied to.
    #[error("invalid operation: {0}")]
    InvalidOperation(String),
    /// A trace uses more operations or bits than its budget allows.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    /// An exhaustive routine was asked for a size beyond its guard.
    #[error("input too large for exhaustive routine: {0}")]
    TooLarge(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    /// Malformed text or binary input.
    #[error("format error: {0}")]
    Format(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// No seed in the search range satisfied the acceptance test.
    #[error("seed search exhausted after {0} candidates")]
    SeedExhausted(u64),
    /// Reed-Solomon decoding found more damage than the code can fix.
    #[error("decoding failed: {0}")]
    DecodeFailed(String),
    /// Set reconciliation could not recover the remote set.
    #[error("reconciliation failed: {0}")]
    ReconcileFailed(String),
    /// The recovered partition chain is not a single path.
    #[error("ambiguous chain: {0}")]
    Ambiguous(String),
}
