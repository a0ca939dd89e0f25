use thiserror::Error;

/// Errors surfaced by the library. The variants mirror how operations can
/// fail: malformed inputs (`Structural`, `Value`), inputs outside an
/// operation's domain (`Domain`, `Precondition`), solver budgets
/// (`Resource`), and certified bounds that fail to hold (`Assertion`).
#[derive(Debug, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("value error: {0}")]
    Value(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("certified bound violated: {0}")]
    Assertion(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
