use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid stage: need 1 <= t <= n, got n = {n}, t = {t}")]
    InvalidStage { n: u32, t: u32 },

    #[error("n = {n} is outside the supported range 1..={max}")]
    SizeOutOfRange { n: u32, max: u32 },

    #[error("n = {n} is too small for this operation (need n >= {min})")]
    SizeTooSmall { n: u32, min: u32 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("event cannot occur in state {state}: {reason}")]
    Infeasible { state: String, reason: &'static str },

    #[error("matrix is singular")]
    Singular,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
