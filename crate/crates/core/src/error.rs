use thiserror::Error;

/// Library-wide error type. The CLI maps these onto its exit codes:
/// search exhaustion → 2, certification failure → 3, invalid input → 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("scan exhausted in {stage}: {detail}")]
    ScanExhausted { stage: &'static str, detail: String },

    #[error("search budget exhausted in {stage}: {detail}")]
    BudgetExhausted { stage: &'static str, detail: String },

    #[error("certification failure: {0}")]
    CertificationFailure(String),

    #[error("inconsistent congruence system: {0}")]
    InconsistentCongruences(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Exit code for the CLI contract (0 success, 2 search exhaustion,
    /// 3 certification failure, 4 invalid target).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ScanExhausted { .. } | Error::BudgetExhausted { .. } => 2,
            Error::CertificationFailure(_) => 3,
            Error::InvalidInput(_) | Error::InconsistentCongruences(_) => 4,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}
