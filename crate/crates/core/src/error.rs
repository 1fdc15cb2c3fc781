use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NlsError {
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("truncated tail too large: estimated relative tail {tail:.3e} exceeds {limit:.1e}")]
    TailTooLarge { tail: f64, limit: f64 },
    #[error("value {value} outside admissible range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("translation is not representable on a radial grid")]
    UnsupportedTranslation,
    #[error("field is identically zero")]
    ZeroField,
    #[error("trace is empty")]
    EmptyTrace,
    #[error("exponent pair (q = {q}, r = {r}) is not admissible in dimension {d}")]
    NotAdmissible { q: f64, r: f64, d: usize },
    #[error("no concentration: linear scattering size {size:.3e} below threshold {eta:.3e}")]
    NoConcentration { size: f64, eta: f64 },
}

pub type Result<T> = std::result::Result<T, NlsError>;
