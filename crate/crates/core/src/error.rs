use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be positive, got {0}")]
    BadDegree(usize),
    #[error("F_{{{p}^{d}}} is too large for table arithmetic")]
    FieldTooLarge { p: u64, d: usize },
    #[error("bad modulus: {0}")]
    BadModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("cannot parse field element: {0}")]
    Parse(String),
    #[error("generator images do not define a field embedding: {0}")]
    NotAnEmbedding(String),
}

/// Errors and partial-function markers raised by the library.
///
/// Markers (`NotInSpan`, `NotMember`, ...) describe a value outside the domain of a
/// partial operation rather than a malfunction; see [`Error::is_marker`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("level error: requested level {requested} exceeds available level {available}")]
    LevelError { requested: u32, available: u32 },
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("tuple is not p-independent")]
    NotPIndependent,
    #[error("element is not in the p^m-span of the tuple")]
    NotInSpan,
    #[error("element is not a p-th power")]
    NotAPthPower,
    #[error("Witt vectors belong to different rings")]
    RingMismatch,
    #[error("Witt vector is not divisible by p")]
    NotDivisible,
    #[error("Witt vector is not a member of the Cohen-Witt ring")]
    NotMember,
    #[error("element is not in the perfect core")]
    NotInPerfectCore,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("tower incompatible between levels {upper} and {lower} at {alpha}")]
    TowerIncompatible { upper: usize, lower: usize, alpha: String },
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("relative p-basis witness is invalid: {0}")]
    SeparabilityWitnessInvalid(String),
    #[error("stage {stage} exceeds the ring length {len}")]
    StageError { stage: usize, len: usize },
    #[error("precision exhausted by cancellation")]
    PrecisionExhausted,
    #[error("element is not integral")]
    NotIntegral,
    #[error("requested precision {requested} exceeds available precision {available}")]
    PrecisionError { requested: usize, available: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("sort error: {0}")]
    SortError(String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("formula syntax error: {0}")]
    Syntax(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Variant name, used as a stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Field(_) => "FieldError",
            Error::LevelError { .. } => "LevelError",
            Error::IndexMismatch(_) => "IndexMismatch",
            Error::NotPIndependent => "NotPIndependent",
            Error::NotInSpan => "NotInSpan",
            Error::NotAPthPower => "NotAPthPower",
            Error::RingMismatch => "RingMismatch",
            Error::NotDivisible => "NotDivisible",
            Error::NotMember => "NotMember",
            Error::NotInPerfectCore => "NotInPerfectCore",
            Error::InvalidModel(_) => "InvalidModel",
            Error::TowerIncompatible { .. } => "TowerIncompatible",
            Error::ModelMismatch(_) => "ModelMismatch",
            Error::SeparabilityWitnessInvalid(_) => "SeparabilityWitnessInvalid",
            Error::StageError { .. } => "StageError",
            Error::PrecisionExhausted => "PrecisionExhausted",
            Error::NotIntegral => "NotIntegral",
            Error::PrecisionError { .. } => "PrecisionError",
            Error::DivisionByZero => "DivisionByZero",
            Error::SortError(_) => "SortError",
            Error::UnboundVariable(_) => "UnboundVariable",
            Error::Syntax(_) => "Syntax",
            Error::Unsupported(_) => "Unsupported",
        }
    }

    /// True for partial-function markers, false for genuine faults.
    pub fn is_marker(&self) -> bool {
        matches!(
            self,
            Error::NotInSpan
                | Error::NotAPthPower
                | Error::NotDivisible
                | Error::NotMember
                | Error::NotInPerfectCore
                | Error::NotIntegral
                | Error::NotPIndependent
                | Error::PrecisionExhausted
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
