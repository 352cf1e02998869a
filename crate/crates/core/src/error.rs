use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid must have an odd number of points >= 3, got {len}")]
    BadGrid { len: usize },
    #[error("density has (near) zero mass {mass:e}")]
    ZeroMass { mass: f64 },
    #[error("density sample {index} is negative or not finite: {value}")]
    InvalidSample { index: usize, value: f64 },
    #[error("point {x} lies outside the unit domain")]
    DomainError { x: f64 },
    #[error("operation requires a normalized density")]
    NotNormalized,
    #[error("dataset is empty")]
    EmptyData,
    #[error("sample {index} = {value} lies outside [0, 1]")]
    OutOfDomain { index: usize, value: f64 },
    #[error("moment orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("moment <x^{needed}> required but only {available} moments are known")]
    InsufficientMoments { needed: usize, available: usize },
    #[error("remainder bound evaluated to negative value {value}; boundary data is inconsistent")]
    NegativeBound { value: f64 },
    #[error("grids differ in size: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },
    #[error("tolerance must be positive and finite, got {epsilon}")]
    BadTolerance { epsilon: f64 },
    #[error("sigma must be positive and finite, got {sigma}")]
    BadSigma { sigma: f64 },
    #[error("zero band [{lo}, {hi}] is invalid for {modes} modes")]
    BadBand { lo: usize, hi: usize, modes: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
