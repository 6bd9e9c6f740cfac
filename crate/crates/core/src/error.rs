use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("record {index} ({id}): {column} = {value} is not positive")]
    NonPositivePValue {
        index: usize,
        id: String,
        column: &'static str,
        value: f64,
    },

    #[error("record {index} ({id}): {column} = {value} exceeds 1")]
    PValueAboveOne {
        index: usize,
        id: String,
        column: &'static str,
        value: f64,
    },

    #[error("record {index} ({id}): {column} is not a finite number")]
    NonFinitePValue {
        index: usize,
        id: String,
        column: &'static str,
    },

    #[error("record {index}: duplicate id {id:?} (first seen at record {first})")]
    DuplicateId {
        index: usize,
        first: usize,
        id: String,
    },

    #[error("{r1} followed-up features but only m = {m} were examined")]
    R1ExceedsM { r1: usize, m: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("record {index} ({id}): p1 = {p1} exceeds the selection threshold t = {t}")]
    SelectionThresholdViolated {
        index: usize,
        id: String,
        p1: f64,
        t: f64,
    },

    #[error("no consistent harmonic regime for c~1 at x = {x}, t = {t}")]
    NoConsistentRegime { x: f64, t: f64 },

    #[error(
        "refinement needs the non-followed primary p-values or an explicit padding assumption"
    )]
    MissingPrimaryVector,

    #[error(
        "primary p-value vector has {got} entries for non-followed features, expected {expected}"
    )]
    PrimaryVectorLength { got: usize, expected: u64 },

    #[error("feature index {index} out of range for {len} records")]
    FeatureOutOfRange { index: usize, len: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Position of the offending record, for errors tied to one record.
    pub fn record_index(&self) -> Option<usize> {
        match self {
            Error::NonPositivePValue { index, .. }
            | Error::PValueAboveOne { index, .. }
            | Error::NonFinitePValue { index, .. }
            | Error::DuplicateId { index, .. }
            | Error::SelectionThresholdViolated { index, .. } => Some(*index),
            _ => None,
        }
    }
}
