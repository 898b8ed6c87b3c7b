//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition of an operation.
    InvalidArgument(String),
    /// A model definition is unusable (non-monotone time change, failed
    /// envelope validation, non-positive tube scaling, ...).
    Model(String),
    /// A run-level precondition does not hold, e.g. ε above the admissible
    /// threshold for the model.
    Precondition(String),
    /// Path generation exceeded the configured step budget.
    Runaway {
        steps: u64,
        epsilon: f64,
        horizon: f64,
    },
    /// A numerical scheme produced a non-finite state.
    Diverged { step: usize },
    /// An iterative numerical routine did not converge within its budget.
    NonConvergent(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Model(msg) => write!(f, "model error: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::Runaway {
                steps,
                epsilon,
                horizon,
            } => write!(
                f,
                "step budget exceeded after {steps} steps (epsilon={epsilon}, horizon={horizon}); \
                 the tube scaling is likely degenerate"
            ),
            Error::Diverged { step } => {
                write!(f, "scheme diverged to a non-finite state at step {step}")
            }
            Error::NonConvergent(msg) => write!(f, "did not converge: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
