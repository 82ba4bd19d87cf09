use thiserror::Error;

/// Errors produced by receiver-model operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter is outside its admissible range.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Input data cannot support the requested computation (for example a
    /// fringe scan with no angular spread).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An iterative fit stopped without reaching its convergence criteria.
    #[error("fit failed: {0}")]
    FitFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
