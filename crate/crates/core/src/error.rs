use thiserror::Error;

/// Errors raised by the beamforming library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("conic solver failed: {0}")]
    Solver(String),

    /// A bisection step hit a solver failure; the bracket at the time of failure is kept.
    #[error("bisection aborted at t = {t:.6e} (bracket [{lo:.6e}, {hi:.6e}]): {reason}")]
    Bisection {
        t: f64,
        lo: f64,
        hi: f64,
        reason: String,
    },

    /// An internal guarantee did not hold; indicates a bug rather than bad input.
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension {
            context,
            expected,
            got,
        })
    }
}
