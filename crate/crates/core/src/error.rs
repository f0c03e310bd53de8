use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty interval list")]
    EmptyIntervals,

    #[error("malformed interval [{0}, {1}]: need finite a < b")]
    BadInterval(f64, f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("polynomial is constant")]
    ConstantPolynomial,

    #[error("polynomial is not squarefree")]
    NotSquarefree,

    #[error("expected integer coefficients")]
    NotInteger,

    #[error("coincident atoms at {0}")]
    CoincidentAtoms(f64),

    #[error("measure has mass {0}, expected 1")]
    NotNormalized(f64),

    #[error("gap index {index} out of range for {gaps} gaps")]
    GapIndex { index: usize, gaps: usize },

    #[error("linear system ill-conditioned (condition estimate {0:.3e})")]
    IllConditioned(f64),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}
