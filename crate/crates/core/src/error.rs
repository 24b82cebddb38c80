use thiserror::Error;

/// Error type shared by all modules in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (bad vector length, invalid instance
    /// file, infeasible parameters supplied by a caller).
    #[error("input error: {0}")]
    Input(String),

    /// Randomized construction did not succeed within its retry budget.
    #[error("generation failed: {0}")]
    Generation(String),

    /// Request exceeds a configured resource limit (spin/qubit count).
    #[error("resource limit exceeded: {0}")]
    Limit(String),

    /// An operation was invoked outside its contract (e.g. odd-k helper on
    /// an even-k instance).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Degenerate randomness (C <= 0); callers retry with a fresh seed.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The propagator could not meet the requested tolerance.
    #[error("propagation failed: {0}")]
    Propagation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
