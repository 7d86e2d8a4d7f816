use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("asymmetric act: {0} lists {1} but not the reverse")]
    AsymmetricAct(String, String),

    #[error("unknown element {0}")]
    UnknownElement(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("calibration failed at bullet '{bullet}': {detail}")]
    Calibration { bullet: String, detail: String },

    #[error("malformed word: {0}")]
    MalformedWord(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("windmill already complete")]
    Complete,

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code: 2 for bad input, 3 for fatal invariant violations, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::InvalidInstance(_)
            | Error::AsymmetricAct(..)
            | Error::UnknownElement(_)
            | Error::MalformedWord(_) => 2,
            Error::Invariant(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
