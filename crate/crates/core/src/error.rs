use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid tensor factor {factor} (space has {count} factors)")]
    InvalidFactor { factor: usize, count: usize },

    #[error("invalid site list {sites:?} for a chain of {len} factors")]
    InvalidSites { sites: Vec<usize>, len: usize },

    #[error("interpolation needs distinct points: {0}")]
    Interpolation(String),

    #[error("boundary constraint violated: c^2 = {lhs}, c1*c2 + c = {rhs}")]
    Constraint { lhs: String, rhs: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("singular gauge: {0} vanishes")]
    SingularGauge(String),

    #[error("evaluation at a pole: {0}")]
    Pole(String),

    #[error("degenerate Bethe roots: {0}")]
    DegenerateRoots(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("newton solver: {0}")]
    Solver(String),

    #[error("zero state vector (norm {norm:e}): {context}")]
    NullState { norm: f64, context: String },
}

pub type Result<T> = std::result::Result<T, Error>;
