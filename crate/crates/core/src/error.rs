use thiserror::Error;

/// Errors raised by structure construction and the numerical operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HkError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quaternionic dimension must be at least 1")]
    ZeroDimension,

    #[error("metric is not positive-definite at the queried point")]
    DegenerateMetric,

    #[error("matrix is not antisymmetric (max |K + K^T| = {0:e})")]
    NotAntisymmetric(f64),

    #[error("matrix has odd order {0}")]
    OddOrder(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("quaternion is not of unit norm (|h| = {0})")]
    NonUnitQuaternion(f64),

    #[error("sphere coefficient is not of unit norm (|c| = {0})")]
    NonUnitSphere(f64),

    #[error("triple violates the quaternionic relations (algebra residual {algebra:e}, orthogonality residual {orthogonality:e})")]
    NotQuaternionic { algebra: f64, orthogonality: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("structure labels must be pairwise distinct")]
    RepeatedLabels,

    #[error("label {0} out of range (labels are 1, 2, 3)")]
    LabelOutOfRange(usize),

    #[error("block index {index} out of range 1..={n}")]
    BlockOutOfRange { index: usize, n: usize },

    #[error("Christoffel symbols are not symmetric in their lower indices (max asymmetry {0:e})")]
    AsymmetricConnection(f64),

    #[error("Hessian is not symmetric (max asymmetry {0:e})")]
    AsymmetricHessian(f64),

    #[error("operation is only defined for n = 1 (got n = {0})")]
    UnsupportedDimension(usize),

    #[error("operation requires a structure in standard block form")]
    NotStandardForm,

    #[error("non-finite state encountered; last valid time t = {last_valid_time}")]
    Divergence { last_valid_time: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, HkError>;
