use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("q = 1 is the classical point; use the classical limit path")]
    ClassicalPoint,

    #[error("functions live on different lattices")]
    LatticeMismatch,

    #[error("operands are built on different bases")]
    BasisMismatch,

    #[error("time mismatch: expected {expected}, found {found}")]
    TimeMismatch { expected: f64, found: f64 },

    #[error("variant {variant} is not defined in geometry {geometry}")]
    VariantGeometryMismatch { variant: String, geometry: String },

    #[error("kernel already carries causality {0}")]
    AlreadyCausal(String),

    #[error("kernels of different variants cannot be composed: {0} vs {1}")]
    VariantMismatch(String, String),

    #[error("operation is undefined on the source slice t_target = t_source = {0}")]
    OnSourceSlice(f64),

    #[error("eigen-decomposition failed: {0}")]
    Diagonalization(String),

    #[error("singular linear system (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("adiabatic switching requires eps > 0 (got {0})")]
    NonPositiveEpsilon(f64),

    #[error("time window T = {window} too short for eps = {eps}: exp(-eps*T) = {residual:e} > 1e-8")]
    InsufficientWindow { window: f64, eps: f64, residual: f64 },

    #[error("quadrature failed to converge on [{start}, {end}] (estimate {estimate:e})")]
    QuadratureFailure { start: f64, end: f64, estimate: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("empty time window")]
    EmptyTimeWindow,

    #[error("malformed data: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
