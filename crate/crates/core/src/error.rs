use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("trace is not one (trace {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not invertible (smallest singular value {0:e})")]
    NotInvertible(f64),
    #[error("image vanishes numerically (norm or trace {0:e})")]
    Vanishing(f64),
    #[error("probabilities do not sum to one (sum {sum}) at {location}")]
    Probability { sum: f64, location: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("no convergence after {steps} steps (residual {residual:e})")]
    NonConvergence { steps: usize, residual: f64 },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl Error {
    /// Process exit code: 2 for invalid input, 3 for numerical failure, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } | Error::Vanishing(_) | Error::NotInvertible(_) => 3,
            Error::Io(_) | Error::Csv(_) => 4,
            _ => 2,
        }
    }

    /// Short machine-readable kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::NotHermitian(_) => "not-hermitian",
            Error::NotPositive(_) => "not-positive",
            Error::NotNormalized(_) => "not-normalized",
            Error::NotUnitary(_) => "not-unitary",
            Error::NotInvertible(_) => "not-invertible",
            Error::Vanishing(_) => "vanishing",
            Error::Probability { .. } => "probability",
            Error::Invalid(_) => "invalid",
            Error::NonConvergence { .. } => "non-convergence",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    /// `{"error": kind, "message": ..., "exit_code": ...}` plus the line and
    /// column of JSON syntax errors.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() });
        if let Error::Json(e) = self {
            v["line"] = e.line().into();
            v["column"] = e.column().into();
        }
        v
    }
}
