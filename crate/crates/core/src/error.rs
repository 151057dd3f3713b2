use thiserror::Error;

use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("prefix length {requested} exceeds the configured maximum {max}")]
    ResourceLimit { requested: u64, max: u64 },
    #[error("set has measure zero")]
    ZeroMass,
    #[error("measure of the set cannot be resolved exactly")]
    UndefinedMass,
    #[error("partition invalid: {0}")]
    PartitionInvalid(String),
    #[error("density integrates to {0}, not 1")]
    Normalization(Q),
    #[error("unstructured input: {0}")]
    Unstructured(String),
    #[error("value undefined for {0}")]
    UndefinedValue(String),
    #[error("base generator {0} has no exact value")]
    InexactBase(String),
    #[error("schedule violation: {0}")]
    ScheduleViolation(String),
    #[error("per-block limit of {0} cannot be resolved")]
    DecayUnresolvable(String),
    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),
    #[error("oracle failure: {0}")]
    OracleFailure(String),
    #[error("stream exhausted: {0}")]
    ExhaustedStream(String),
    #[error("input is not null: {0}")]
    NonNullInput(String),
    #[error("level {level} out of range 1..={max}")]
    LevelOutOfRange { level: u32, max: u32 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
