use thiserror::Error;

use crate::invariance::ConditionId;
use crate::primitives::dihedral::DihedralElement;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(usize),
    #[error("expected {expected} entries, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("row ({0},{1},{2}) does not sum to 1")]
    RowNotStochastic(usize, usize, usize),
    #[error("matrix row {0} does not sum to 1")]
    MatrixRowNotStochastic(usize),
    #[error("negative entry at index {0}")]
    NegativeEntry(usize),
    #[error("entries sum to {0}, not 1")]
    NotNormalized(String),
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("kernel does not have positive rates")]
    NonPositiveRates,
    #[error("probability vector is not positive")]
    NotPositive,
    #[error("matrices do not commute")]
    NotCommuting,
    #[error("left 1-eigenspace has dimension {0}, expected 1")]
    EigenvectorNotUnique(usize),
    #[error("reverse under {0:?} requires {1:?}")]
    PreconditionFailed(DihedralElement, ConditionId),
    #[error("kernel is not in Triang(S,p)")]
    NotInTriang,
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("expected {expected} free parameters, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("perturbation too large: entry ({0},{1},{2};{3}) leaves (0,1)")]
    EpsilonTooLarge(usize, usize, usize, usize),
    #[error("direct and flipped marginals disagree")]
    InternalDisagreement,
    #[error("invalid polyline: {0}")]
    InvalidPolyline(String),
    #[error("periodic boundary needs an even width, got {0}")]
    OddWidthPeriodic(usize),
    #[error("state space of {0} states exceeds the limit")]
    StateSpaceTooLarge(usize),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("weights violate a+c=b+d")]
    ConstraintViolated,
    #[error("argument outside the convergence domain")]
    OutOfDomain,
    #[error("gap law series diverges (tail ratio {0})")]
    Divergent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
