use thiserror::Error;

/// Errors produced by series arithmetic, enumeration and verification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("incompatible marking variables: {left:?} vs {right:?}")]
    IncompatibleMarks { left: Vec<String>, right: Vec<String> },

    #[error("constant term {0} is not invertible")]
    NonUnitConstant(String),

    #[error("square root needs constant term 1, found {0}")]
    SqrtConstant(String),

    #[error("exact division impossible: dividend valuation {dividend} < divisor valuation {divisor}")]
    InexactDivision { dividend: usize, divisor: usize },

    #[error("fixed-point map is not a contraction: iterate {iteration} changed coefficient {index}")]
    NonContraction { iteration: usize, index: usize },

    #[error("map returned a series of order {got}, needed at least {needed}")]
    PrecisionLoss { got: usize, needed: usize },

    #[error("value {0} is not an integer")]
    NotIntegral(String),

    #[error("refusing to enumerate {arity}-ary trees of size {size}: cap is {cap}")]
    EnumerationCap { arity: usize, size: usize, cap: usize },

    #[error("tree arity {tree} does not match step set of size {steps}")]
    ArityMismatch { tree: usize, steps: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
