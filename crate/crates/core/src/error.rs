use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("action is not free")]
    NotFreeAction,
    #[error("grading error: {0}")]
    GradingError(String),
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("not a cocycle (max residual {residual:e})")]
    NotCocycle { residual: f64 },
    #[error("pair is not in Z (max residual {residual:e})")]
    NotInZ { residual: f64 },
    #[error("compact normalization needs an invariant measure on the group")]
    MissingMeasure,
    #[error("fiber-product level mismatch: {0}")]
    LevelError(String),
    #[error("input is not closed: {0}")]
    NotClosed(String),
    #[error("form is not basic: {0}")]
    NotBasic(String),
    #[error("no section recorded for {0}")]
    NoSection(String),
    #[error("not equivariant: {0}")]
    NotEquivariant(String),
    #[error("obstruction does not vanish for the given witness: {0}")]
    ObstructionNonzero(String),
    #[error("zeta is nonzero, kappa is not invariant (max |zeta| {0:e})")]
    NotInvariantizable(f64),
    #[error("moment mismatch: mu = {mu:?}")]
    MomentMismatch { mu: Vec<f64> },
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(i64, i64),
    #[error("resolution too coarse (residual {0:e})")]
    ResolutionError(f64),
    #[error("numeric verdict indeterminate (distance to integer {0:e})")]
    Indeterminate(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
