use thiserror::Error;

pub type Result<T> = std::result::Result<T, FidError>;

#[derive(Debug, Error)]
pub enum FidError {
    /// An input violated a documented precondition.
    #[error("invalid {field}: {message}")]
    Validation { field: &'static str, message: String },

    /// The request exceeds what an engine can compute (memory or overflow guards).
    #[error("{0}")]
    ComputeGuard(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("operator dimensions do not match: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (max |A - A^†| = {0:e})")]
    NotHermitian(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FidError {
    pub(crate) fn validation(field: &'static str, message: impl Into<String>) -> Self {
        FidError::Validation { field, message: message.into() }
    }

    /// Short machine-readable category name.
    pub fn kind(&self) -> &'static str {
        match self {
            FidError::Validation { .. } => "validation",
            FidError::ComputeGuard(_) => "compute_guard",
            FidError::Parse { .. } => "parse",
            FidError::DimensionMismatch { .. } => "dimension_mismatch",
            FidError::NotHermitian(_) => "not_hermitian",
            FidError::Io(_) => "io",
        }
    }
}
