use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector is not a unit vector (|v| = {norm})")]
    NotAUnitVector { norm: f64 },
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("integrand is not differentiable at the declared non-smooth normal {0:?}")]
    NotDifferentiable(Vec<f64>),
    #[error("integrand is not twice differentiable at the declared non-smooth normal {0:?}")]
    NotTwiceDifferentiable(Vec<f64>),
    #[error("integrand vanishes somewhere on the sphere; Wulff and Cahn-Hoffman operations need a positive integrand")]
    NonPositiveIntegrand,
    #[error("sphere grid is empty")]
    EmptyGrid,
    #[error("unsupported sphere dimension {0}; only 1 and 2 are supported")]
    UnsupportedDimension(usize),
    #[error("grid resolution {0} is below the minimum of 8")]
    ResolutionTooSmall(usize),
    #[error("unknown gallery integrand '{0}'")]
    UnknownGalleryName(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("half-space intersection is unbounded or empty")]
    UnboundedOrEmpty,
    #[error("Wulff construction degenerated: {0}")]
    DegenerateIntersection(String),
    #[error("node {0} is singular (the parametrization is not an immersion there)")]
    SingularNode(usize),
    #[error("{excluded} of {total} nodes excluded, more than the allowed 10%")]
    TooManyExcludedNodes { excluded: usize, total: usize },
    #[error("hypersurface is not closed: {0}")]
    NotClosed(String),
    #[error("patch edge identification failed: {0}")]
    EdgeMismatch(String),
    #[error("invalid patch: {0}")]
    InvalidPatch(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
