use thiserror::Error;

/// Errors raised by the MDS toolkit.
///
/// Validation failures name the offending indices so callers can point at
/// the bad entry of an input file.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("asymmetric distance matrix: d[{i}][{j}] = {dij} but d[{j}][{i}] = {dji}")]
    AsymmetricMatrix { i: usize, j: usize, dij: f64, dji: f64 },

    #[error("negative or non-finite distance d[{i}][{j}] = {value}")]
    NegativeDistance { i: usize, j: usize, value: f64 },

    #[error("nonzero diagonal entry d[{i}][{i}] = {value}")]
    NonzeroDiagonal { i: usize, value: f64 },

    #[error("triangle inequality violated: d[{i}][{j}] = {dij} > d[{i}][{k}] + d[{k}][{j}] = {via}")]
    TriangleViolation { i: usize, j: usize, k: usize, dij: f64, via: f64 },

    #[error("bad weights: {0}")]
    BadWeights(String),

    #[error("point is not on the space: {0}")]
    PointOffManifold(String),

    #[error("no canonical grid for {0}")]
    GridUnsupported(String),

    #[error("strain is only defined for uniform weights")]
    NonUniformWeights,

    #[error("eigensolver did not converge for a {n}x{n} matrix within {budget} iterations (norm {norm:e})")]
    NoConvergence { n: usize, budget: usize, norm: f64 },

    #[error("series did not reach tolerance {tol:e} within {budget} terms (last partial sum {partial:e})")]
    ToleranceNotReached { tol: f64, budget: usize, partial: f64 },

    #[error("quadrature did not converge: last two estimates {previous:e} and {current:e}")]
    QuadratureNotConverged { previous: f64, current: f64 },

    #[error("coupling marginal mismatch: {0}")]
    MarginalMismatch(String),

    #[error("brute force search limited to n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::ToleranceNotReached { .. }
                | Error::QuadratureNotConverged { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
