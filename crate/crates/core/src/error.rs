use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimated error {estimate:e} exceeds {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("series coefficient c_{index} overflowed")]
    Overflow { index: usize },

    #[error("expected {expected} real roots, found {found}")]
    RootCount { expected: usize, found: usize },

    #[error("parity violation: coefficient of degree {degree} is {value:e}")]
    Parity { degree: usize, value: f64 },

    #[error("overlap matrix retained no directions above the cutoff")]
    EmptyBasis,

    #[error("generalized eigenvector {index} residual {residual:e} exceeds {bound:e}")]
    Residual {
        index: usize,
        residual: f64,
        bound: f64,
    },

    #[error("state index {index} out of range (retained {available})")]
    Index { index: usize, available: usize },

    #[error("eigenfunction not decayed at the box edge (tail ratio {ratio:e}); enlarge L")]
    Decay { ratio: f64 },

    #[error("no positive frequency reproduces the truncation condition")]
    NoFrequency,
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
