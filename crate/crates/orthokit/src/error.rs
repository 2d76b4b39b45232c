use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operands belong to different ring contexts")]
    CtxMismatch,
    #[error("modulus {0} rejected: need an odd integer >= 3 so that 2 is a unit")]
    InvalidModulus(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("membership witness required: ideal membership is undecidable in this context")]
    WitnessRequired,
    #[error("cap {cap} exceeded (reached {reached})")]
    CapExceeded { cap: usize, reached: usize },
    #[error("matrix is not invertible over its ring")]
    NotInvertible,
    #[error("word is not in relative form: {0}")]
    NotRelativeForm(String),
    #[error("subgroup is not normal: {0}")]
    NotNormal(String),
    #[error("no retraction available: {0}")]
    NoRetraction(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
