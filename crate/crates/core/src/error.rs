use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("antenna counts must be positive (m={m}, n={n})")]
    InvalidDims { m: usize, n: usize },

    #[error("multiplexing gain {value} is invalid: {reason}")]
    InvalidMultiplexingGain { value: f64, reason: &'static str },

    #[error("SNR must be positive and finite, got {0}")]
    InvalidSnr(f64),

    #[error("{what} has shape {found_rows}x{found_cols}, expected {expected}x{expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found_rows: usize,
        found_cols: usize,
    },

    #[error("matrix is not Hermitian (max |A - A^H| = {max_deviation:e})")]
    NotHermitian { max_deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e}, largest {largest:e})")]
    NotPositiveSemidefinite { eigenvalue: f64, largest: f64 },

    #[error("correlation matrix has zero trace")]
    ZeroTrace,

    #[error("correlation coefficient must lie in [0, 1), got {0}")]
    InvalidCorrelationCoefficient(f64),

    #[error("eigenvalue {0} is not positive")]
    NonpositiveEigenvalue(f64),

    #[error("all correlation eigenvalues are zero")]
    AllEigenvaluesZero,

    #[error("correlation matrix is singular; the low-outage approximation is undefined")]
    SingularCorrelation,

    #[error("channel matrix contains non-finite entries")]
    NonFiniteChannel,

    #[error("{trials} trials requested, at least {min} are required")]
    TooFewTrials { trials: u64, min: u64 },

    #[error("no outages observed at gamma = {gamma:e}; increase the trial count")]
    ZeroOutageCount { gamma: f64 },

    #[error("the diversity exponent for a correlated channel must be supplied explicitly")]
    DiversityRequired,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}
