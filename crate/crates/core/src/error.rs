use thiserror::Error;

/// Errors produced by the state algebra, the classifiers and the Fock oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GdistError {
    #[error("non-physical state: det(cov) = {det} is below 1 - {tol}")]
    NonPhysical { det: f64, tol: f64 },

    #[error("covariance matrix is not symmetric (|b - c| = {asymmetry})")]
    Asymmetric { asymmetry: f64 },

    #[error("matrix is not symplectic: |S Sigma S^T - Sigma| = {residual}")]
    NotSymplectic { residual: f64 },

    #[error("states have different means (|alpha_1 - alpha_2| = {distance})")]
    MeanMismatch { distance: f64 },

    #[error("fidelity is 1: the states are identical and every angle solves the equality")]
    DegenerateFidelity,

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },

    #[error("no classification applies: {0}")]
    Unclassifiable(&'static str),

    #[error("Fock truncation inadequate: leakage {leakage:e} at dim {dim} exceeds {limit:e}")]
    TruncationInadequate { leakage: f64, dim: usize, limit: f64 },

    #[error("Fock operators have different dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("malformed state description at `{field}`: {reason}")]
    Parse { field: String, reason: String },
}

impl GdistError {
    /// True for failures caused by the caller's input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, GdistError::TruncationInadequate { .. } | GdistError::DimensionMismatch(..))
    }
}

pub type Result<T> = std::result::Result<T, GdistError>;
