use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid Young function: {0}")]
    InvalidYoung(String),
    #[error("unknown Young function `{name}`; available: {available}")]
    UnknownFunction { name: String, available: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("field lies in the kernel of the operator (denominator {denominator:e})")]
    KernelMembership { denominator: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("split is not rank-one: {0}")]
    NotRankOne(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
