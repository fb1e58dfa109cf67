use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("enumeration of 3^{edges} configurations exceeds the cap of 3^{cap_exponent}; reduce the depth")]
    SizeCap { edges: usize, cap_exponent: u32 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
