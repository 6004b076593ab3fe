use thiserror::Error;

/// Failure modes shared by every module of the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    /// Array shapes or grids that do not line up.
    #[error("structural error: {0}")]
    Structural(String),
    /// Arguments outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition of an operation was not met.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Malformed configuration or command line.
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(err: std::io::Error) -> Self {
        LabError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

/// Non-fatal diagnostic raised when a function carries spectral mass close to
/// the limit a pointwise product can represent without aliasing.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AliasingWarning {
    /// Frequency above which mass was measured.
    pub cutoff: f64,
    /// Relative L2 mass of the spectrum beyond `cutoff`.
    pub tail_fraction: f64,
    /// Threshold that was exceeded.
    pub threshold: f64,
}

impl std::fmt::Display for AliasingWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "spectral tail {:.3e} beyond |xi| = {:.4} exceeds {:.1e}",
            self.tail_fraction, self.cutoff, self.threshold
        )
    }
}

/// A value together with the warnings produced while computing it.
#[derive(Debug, Clone)]
pub struct Checked<T> {
    pub value: T,
    pub warnings: Vec<AliasingWarning>,
}

impl<T> Checked<T> {
    pub fn clean(value: T) -> Self {
        Checked { value, warnings: Vec::new() }
    }

    pub fn into_value(self) -> T {
        self.value
    }

    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Checked<U> {
        Checked { value: f(self.value), warnings: self.warnings }
    }
}
