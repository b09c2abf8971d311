use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown material `{name}`; available: {}", available.join(", "))]
    UnknownMaterial { name: String, available: Vec<String> },
    #[error("undersampled: {per_cycle:.1} samples per carrier cycle, need at least {min}; increase `samples`")]
    Undersampled { per_cycle: f64, min: usize },
    #[error("pulse spans {cycles:.2} carrier cycles, need at least {min}; use a longer window or a monochromatic pulse")]
    PulseTooShort { cycles: f64, min: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("step size underflow at t = {t} fs (k = {k:?} 1/Å)")]
    StepUnderflow { t: f64, k: Option<f64> },
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("gap closure: overlap modulus {overlap:.3e} at link {index}")]
    GapClosure { overlap: f64, index: usize },
    #[error("coupling matrix is not Hermitian (deviation {0:.3e})")]
    NonHermitian(f64),
    #[error("order {order} exceeds the configured maximum {max}")]
    OrderTooHigh { order: usize, max: usize },
}

impl Error {
    /// True for failures of a numerical procedure on otherwise valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. } | Error::NonConvergence(_) | Error::GapClosure { .. }
        )
    }
}
