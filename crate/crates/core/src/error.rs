use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    Trace(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("relative entropy is infinite: support of rho is not contained in support of sigma")]
    InfiniteRelativeEntropy,

    #[error("invalid site selection: {0}")]
    Sites(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("system too large: {what} requires L <= {max}, got L = {got}")]
    TooLarge {
        what: &'static str,
        max: usize,
        got: usize,
    },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("non-uniform grid: {0}")]
    NonUniformGrid(String),

    #[error("not enough data: {0}")]
    NotEnoughData(String),

    #[error("no crossing inside the window between curves {0} and {1}")]
    NoCrossing(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
