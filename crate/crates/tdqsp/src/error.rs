//! Error taxonomy shared by every module.
//!
//! The CLI maps variants onto exit codes: configuration problems exit 2,
//! precondition/contract violations exit 3, solver non-convergence exits 4.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A matrix dimension exceeded the desk-scale cap.
    #[error("dimension {dim} exceeds the desk-scale cap {cap}")]
    Sizing { dim: usize, cap: usize },

    /// Operand shapes do not match.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A numeric argument fell outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural precondition (hermiticity, unitarity, norm bound) failed.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A polynomial lacked the definite parity a caller required.
    #[error("parity error: {0}")]
    Parity(String),

    /// A polynomial had genuinely complex coefficients where a real target
    /// was required; callers split real and imaginary parts beforehand.
    #[error("non-real target: {0}")]
    NonRealTarget(String),

    /// An iterative solver hit its cap; carries the final residual.
    #[error("convergence failure: {what} (residual {residual:.3e})")]
    Convergence { what: String, residual: f64 },

    /// Model assembly rejected its inputs.
    #[error("model error: {0}")]
    Model(String),

    /// Pairwise term commutators exceeded tolerance.
    #[error("commutativity failure: max pairwise commutator norm {max_norm:.3e} at terms ({i},{j})")]
    Commutativity { max_norm: f64, i: usize, j: usize },

    /// Configuration file could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::Convergence { .. } => 4,
            _ => 3,
        }
    }
}
