use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("label {0} is not one of -1, +1")]
    InvalidLabel(f64),

    #[error("invalid hyperparameter `{name}`: {reason}")]
    InvalidParam {
        name: &'static str,
        reason: &'static str,
    },

    #[error("noise profile has {found} rates but the dataset has {expected} examples")]
    LengthMismatch { expected: usize, found: usize },

    #[error("noise rate {0} is outside [0, 1]")]
    RateOutOfRange(f64),

    #[error("one-class SVM needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("one-class SVM is infeasible: nu * N = {nu} * {n} < 1")]
    Infeasible { nu: f64, n: usize },

    #[error("dataset contains a single class")]
    SingleClass,

    #[error("every example was skipped; nothing left to learn from")]
    Unlearnable,

    #[error("could not draw points with margin {0} within the resample cap")]
    MarginUnattainable(f64),

    #[error("noise rates must be strictly increasing (offending rate {0})")]
    NonIncreasingRates(f64),

    #[error("need at least {needed} rows, got {found}")]
    TooFewRows { needed: usize, found: usize },
}
