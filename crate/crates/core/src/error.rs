use thiserror::Error;

/// Errors raised by geometric constructions and functionals.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported dimension {0} (only 2 and 3 are supported)")]
    UnsupportedDimension(usize),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("origin is not an interior point: {0}")]
    NotOriginInterior(String),
    #[error("singular linear map (det = {0:e})")]
    Singular(f64),
    #[error("zero vector where a direction is required")]
    ZeroVector,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("unsupported quadrature (n = {n}, level = {level})")]
    UnsupportedQuadrature { n: usize, level: usize },
    #[error("negative mixed-measure weight {weight:e} exceeds tolerance")]
    NegativeWeight { weight: f64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("extrapolation failed: {0}")]
    Extrapolation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl GeomError {
    /// Short machine-readable tag used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            GeomError::Domain(_) => "domain",
            GeomError::DimensionMismatch { .. } => "dimension-mismatch",
            GeomError::UnsupportedDimension(_) => "unsupported-dimension",
            GeomError::Degenerate(_) => "degenerate",
            GeomError::NotOriginInterior(_) => "membership",
            GeomError::Singular(_) => "singular",
            GeomError::ZeroVector => "zero-vector",
            GeomError::OutOfRange(_) => "out-of-range",
            GeomError::UnsupportedQuadrature { .. } => "unsupported-quadrature",
            GeomError::NegativeWeight { .. } => "negative-weight",
            GeomError::Hypothesis(_) => "hypothesis",
            GeomError::Extrapolation(_) => "extrapolation",
            GeomError::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(GeomError::UnsupportedDimension(dim))
    }
}

pub(crate) fn expect_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(GeomError::DimensionMismatch { expected, found })
    }
}
