use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: String, right: String },

    #[error("invalid variable name `{0}`")]
    InvalidVariable(String),

    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),

    #[error("arity mismatch: expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("length mismatch: expected vectors of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("chart mismatch: expected `{expected}`, got `{got}`")]
    ChartMismatch { expected: String, got: String },

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("malformed structure functions: {0}")]
    MalformedStructure(String),

    #[error("center codimension {codim} out of range for ambient dimension {dim}")]
    CodimOutOfRange { dim: usize, codim: usize },

    #[error("vector field is not tangent to the center: chart `{chart}`, component `{component}` leaves remainder {remainder}")]
    NotTangentToCenter {
        chart: String,
        component: String,
        remainder: String,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("coefficient extraction inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
