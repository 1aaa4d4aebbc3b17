use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative probability {value} at {location}")]
    NegativeProbability { location: String, value: f64 },

    #[error("row {location} sums to {sum}, deviation from 1 is not below 1e-9")]
    RowSumViolation { location: String, sum: f64 },

    #[error("empty alphabet: {0}")]
    EmptyAlphabet(String),

    #[error("array is not rectangular: {0}")]
    NotRectangular(String),

    #[error("conditional undefined: {0}")]
    UndefinedConditional(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("variable sets overlap: {0}")]
    OverlappingVariableSets(String),

    #[error("variable {0} is not part of the joint distribution")]
    MissingVariable(String),

    #[error("internal consistency: {0}")]
    InternalConsistency(String),

    #[error("auxiliary alphabet of size {size} exceeds the cap {cap} of {family}")]
    CardinalityCapExceeded {
        family: String,
        size: usize,
        cap: usize,
    },

    #[error("family {family} does not accept auxiliary input of kind {aux}")]
    FamilyAuxMismatch { family: String, aux: String },

    #[error("constraint {0} has an all-zero normal")]
    DegenerateConstraintSet(String),

    #[error("negative argument {0}")]
    NegativeArgument(f64),

    #[error("{name} = {value} lies outside [0, 1]")]
    OutOfUnitInterval { name: String, value: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("codebook needs {needed} stored symbols, cap is {cap}")]
    MemoryCapExceeded { needed: u128, cap: u128 },

    #[error("enumeration needs {needed} terms, cap is {cap}")]
    EnumerationCapExceeded { needed: u128, cap: u128 },

    #[error("convex hull: {0}")]
    Hull(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NegativeProbability { .. } => "NegativeProbability",
            Error::RowSumViolation { .. } => "RowSumViolation",
            Error::EmptyAlphabet(_) => "EmptyAlphabet",
            Error::NotRectangular(_) => "NotRectangular",
            Error::UndefinedConditional(_) => "UndefinedConditional",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::OverlappingVariableSets(_) => "OverlappingVariableSets",
            Error::MissingVariable(_) => "MissingVariable",
            Error::InternalConsistency(_) => "InternalConsistency",
            Error::CardinalityCapExceeded { .. } => "CardinalityCapExceeded",
            Error::FamilyAuxMismatch { .. } => "FamilyAuxMismatch",
            Error::DegenerateConstraintSet(_) => "DegenerateConstraintSet",
            Error::NegativeArgument(_) => "NegativeArgument",
            Error::OutOfUnitInterval { .. } => "OutOfUnitInterval",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::MemoryCapExceeded { .. } => "MemoryCapExceeded",
            Error::EnumerationCapExceeded { .. } => "EnumerationCapExceeded",
            Error::Hull(_) => "Hull",
            Error::Json(_) => "ParseError",
            Error::Io(_) => "IoError",
        }
    }
}
