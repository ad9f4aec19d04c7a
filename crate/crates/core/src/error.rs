use thiserror::Error;

/// Errors raised by the matrix, permanent, family, formula and search layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order {0} out of range (must be 1..=64)")]
    OrderOutOfRange(usize),

    #[error("combined order {0} exceeds 64")]
    CombinedOrderTooLarge(usize),

    #[error("index ({i}, {j}) out of range for order {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("order {n} above the {what} budget of {max}")]
    OverBudget {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid family {family} at n={n}, sigma={sigma}: {reason}")]
    InvalidFamily {
        family: String,
        n: usize,
        sigma: usize,
        reason: String,
    },

    #[error("unknown family identifier {0:?}")]
    UnknownFamily(String),

    #[error("outside window: {0}")]
    Window(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("exact comparison budget exceeded: {0}")]
    ComparisonBudget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
