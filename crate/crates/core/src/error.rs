use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("unsupported order {order}: {reason}")]
    UnsupportedOrder { order: usize, reason: &'static str },

    #[error("point {point:?} lies outside the chart domain")]
    Domain { point: Vec<f64> },

    #[error("spanning fields of F are degenerate at {point:?}")]
    DegenerateDistribution { point: Vec<f64> },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("non-finite integrand value {value} at {point:?}")]
    Integration { point: Vec<f64>, value: f64 },

    #[error("unknown geometry `{name}`; available: {}", available.join(", "))]
    UnknownGeometry { name: String, available: Vec<String> },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
