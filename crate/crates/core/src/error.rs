use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("non-finite value in {what} at point {point:?}")]
    NonFinite { what: String, point: Vec<f64> },

    #[error("metric is singular or not positive definite at point {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("frame error at point {point:?}: {reason}")]
    Frame { reason: String, point: Vec<f64> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range 0..={max}")]
    OutOfRange { index: usize, max: usize },

    #[error("unsupported leaf: {0}")]
    UnsupportedLeaf(String),

    #[error("scenario construction failed: {0}")]
    Construction(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
