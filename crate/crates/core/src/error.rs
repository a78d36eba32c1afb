use thiserror::Error;

/// Errors produced anywhere in the certification / extension pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is degenerate for the requested operation (e.g. a zero polynomial).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A guaranteed mathematical fact failed to hold numerically; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),

    /// Jet data failed one of the extension conditions.
    #[error("certification refused: condition ({condition}) failed: {detail}")]
    Certification { condition: u8, detail: String },

    /// A perturbation or lift could not be built, or a postcondition failed.
    #[error("construction error: {0}")]
    Construction(String),

    /// A numeric routine could not reach the requested accuracy.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A job file or other input failed schema validation.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
