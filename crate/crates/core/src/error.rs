use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mixed exact and float scalars in one operation")]
    ModeMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse scalar literal `{0}`")]
    Parse(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid particle configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("invalid plane partition: {0}")]
    InvalidPlanePartition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
