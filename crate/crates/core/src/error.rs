use alloc::string::String;

/// Errors raised anywhere in the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("at most 64 items are supported, got {0}")]
    TooManyItems(usize),
    #[error("invalid bundle string {0:?}")]
    InvalidBundle(String),
    #[error("duplicate report for bundle {0}")]
    DuplicateReport(String),
    #[error("report value must be finite and non-negative, got {0}")]
    InvalidValue(f64),
    #[error("bidder {bidder} has no report for bundle {bundle}")]
    UndefinedReport { bidder: usize, bundle: String },
    #[error("degenerate instance: optimal social welfare is zero")]
    DegenerateInstance,
    #[error("capability exceeded: {0}")]
    Capability(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numeric overflow while {0}")]
    NumericOverflow(String),
    #[error("model kind not supported by this solver: {0}")]
    ModelKind(String),
    #[error("domain too small: {0}")]
    DomainTooSmall(String),
    #[error("bidder {0} has no unqueried bundle left")]
    ExhaustedBidder(usize),
    #[error("winner determination infeasible")]
    Infeasible,
    #[error("mechanism invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = core::result::Result<T, Error>;
