use thiserror::Error;

/// Errors produced by design construction, analysis and search.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    /// Two operands live on point sets of different size.
    #[error("dimension mismatch: {left} points vs {right} points")]
    Dimension { left: usize, right: usize },

    #[error("point {point} is out of range for {v} points")]
    PointOutOfRange { point: usize, v: usize },

    #[error("unsupported point count {v}: a block holds at most {max} points")]
    TooManyPoints { v: usize, max: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The input is outside the family an operation is defined for.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    /// A search exceeded its configured budget. `partial` counts the results
    /// found before the search was cut off; they are never returned as if complete.
    #[error("budget exceeded: {what} (limit {limit}, {partial} partial results discarded)")]
    Budget { what: String, limit: u64, partial: usize },

    /// A property that the theory guarantees failed to hold.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

pub type Result<T, E = DesignError> = std::result::Result<T, E>;
