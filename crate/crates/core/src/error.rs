use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("{func} did not converge after {iterations} iterations")]
    NoConvergence { func: &'static str, iterations: usize },

    #[error("upper bound unavailable: {0}")]
    UpperUnavailable(String),

    #[error("vacuous bound: {0}")]
    Vacuous(String),

    #[error("truncation rejected: {0}")]
    Truncation(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("config error: {0}")]
    ConfigMissing(String),
}

pub type Result<T> = std::result::Result<T, Error>;
