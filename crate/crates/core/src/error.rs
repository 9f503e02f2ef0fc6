use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a mathematical function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A CDF model returned a value outside [0, 1] or is otherwise unusable.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sample {index} has {found} entries, expected {expected}")]
    MismatchedLength { index: usize, expected: usize, found: usize },

    /// The truncated Fourier inversion could not reach the requested accuracy.
    #[error("inversion did not converge: achieved error bound {achieved:.3e}, requested {requested:.3e}")]
    Convergence { achieved: f64, requested: f64 },
}

impl Error {
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. })
    }
}
