use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("D must be at least 2, got {0}")]
    DiscriminantTooSmall(i64),

    #[error("D must be squarefree, got {0}")]
    NotSquarefree(i64),

    #[error("square root of negative integer {0}")]
    NegativeSqrt(String),

    #[error("element {0} is not totally positive")]
    NotTotallyPositive(String),

    #[error("zero element has no content")]
    ZeroElement,

    #[error("({p}+{q}√D)/{den} is not an algebraic integer for D = {d}")]
    NotIntegral {
        p: String,
        q: String,
        den: String,
        d: u64,
    },

    #[error("continued fraction step failed for D = {d}: {q} does not divide {rem}")]
    ContinuedFraction { d: u64, q: String, rem: String },

    #[error("recurrence division not exact at ({x}, {y}): {detail}")]
    DivisibilityViolation { x: i64, y: i64, detail: String },

    #[error("element {0} lies outside the computed grid")]
    OutsideGrid(String),

    #[error("partition enumeration exceeded the node budget of {0}")]
    BudgetExceeded(u64),

    #[error("assertion failed: {0}")]
    AssertionFailure(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
