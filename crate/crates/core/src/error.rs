use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {op} at {location}")]
    NonFinite { op: &'static str, location: String },

    #[error("point {point} maps to s = {s} outside the valid sinogram region")]
    OutsideValidRegion { point: String, s: String },

    #[error("derivative ∂^{p:?}∂̄^{q:?} is not available for {what}")]
    DerivativeUnavailable { what: String, p: [u32; 2], q: [u32; 2] },

    #[error("no escape path at clearance {requested}; maximal achievable clearance {achievable}")]
    NoEscapePath { requested: f64, achievable: f64 },

    #[error("no grid direction separates the point from the set")]
    NoSeparatingDirection,

    #[error("container format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

/// `Ok` if `cond`, else an invalid-argument error with the given message.
pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidArgument(msg()))
    }
}

/// Positive and finite.
pub(crate) fn ensure_positive(field: &str, v: f64) -> Result<()> {
    ensure(v > 0.0 && v.is_finite(), || format!("{field} must be positive and finite, got {v}"))
}
