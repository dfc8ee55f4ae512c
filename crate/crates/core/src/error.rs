use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the solvers, transforms and verification harnesses.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("lambda = {lambda} lies outside the sector (epsilon = {epsilon}, lambda0 = {lambda0})")]
    OutsideSector {
        lambda: Complex64,
        epsilon: f64,
        lambda0: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("wrong grid kind: {0}")]
    WrongGridKind(String),

    #[error("symbol is not finite at frequency {frequency:?} (value {value})")]
    NonFiniteSymbol { frequency: Vec<f64>, value: Complex64 },

    #[error("branch violation: {0}")]
    BranchViolation(String),

    #[error("quadrature tail not converged: {detail}; increase X_max (advice: {advice})")]
    QuadratureTail { detail: String, advice: String },

    #[error("contour truncation error: {detail}; increase r_max (advice: {advice})")]
    ContourTruncation { detail: String, advice: String },

    #[error("Neumann series did not contract: kappa = {kappa:.4} after {terms} terms")]
    ContractionFailure { kappa: f64, terms: usize },

    #[error("exponent window violated: {0}")]
    ExponentWindow(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("singular system at lambda = {lambda}: {detail}")]
    SingularSystem { lambda: Complex64, detail: String },

    #[error("divergent dyadic block sum at block j = {block}")]
    DivergentBlockSum { block: i32 },

    #[error("configuration error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("acceptance check failed: {0}")]
    Acceptance(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> LabError {
    LabError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
