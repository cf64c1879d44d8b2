use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("operator is not dichotomic (max deviation of op² from I is {deviation:e})")]
    NotDichotomic { deviation: f64 },
    #[error("expectation value has imaginary residue {residue:e}")]
    ImaginaryExpectation { residue: f64 },
    #[error("negative probability {value:e}")]
    NegativeProbability { value: f64 },
    #[error("invalid preparation: {0}")]
    Preparation(String),
    #[error("spin direction is not a unit vector (|n| = {norm})")]
    NonUnitDirection { norm: f64 },
    #[error("hidden-variable weights are invalid: {0}")]
    InvalidModel(String),
    #[error("invalid detector model: {0}")]
    Detector(String),
    #[error("no detected events")]
    NoDetections,
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
}

impl Error {
    /// True for failures that indicate an internal invariant breach rather
    /// than bad input.
    pub fn is_invariant_breach(&self) -> bool {
        matches!(
            self,
            Error::ImaginaryExpectation { .. }
                | Error::NegativeProbability { .. }
                | Error::NotHermitian { .. }
        )
    }
}
