use thiserror::Error;

/// Errors produced anywhere in the workbench.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field mismatch")]
    FieldMismatch,
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("no root")]
    NoRoot,
    #[error("irrational discriminant")]
    IrrationalDiscriminant,
    #[error("unsupported extension")]
    UnsupportedExtension,
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero vector")]
    ZeroVector,
    #[error("not alternating: {0}")]
    NotAlternating(String),
    #[error("degenerate form")]
    DegenerateForm,
    #[error("space mismatch")]
    SpaceMismatch,
    #[error("dimension budget exceeded (cap {0})")]
    DimensionBudget(usize),
    #[error("not extremal")]
    NotExtremal,
    #[error("pure required")]
    PureRequired,
    #[error("not hyperbolic")]
    NotHyperbolic,
    #[error("not a polar pair")]
    NotPolarPair,
    #[error("not a symplectic triple: {0}")]
    NotSymplecticTriple(String),
    #[error("table mismatch: {0}")]
    TableMismatch(String),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("frame chain gap")]
    FrameChainGap,
    #[error("theta inconsistency: {0}")]
    ThetaInconsistency(String),
    #[error("product not proportional: {0}")]
    NotProportional(String),
    #[error("no noncommuting pair")]
    NoNoncommutingPair,
    #[error("hypothesis failure: {0}")]
    Hypothesis(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
