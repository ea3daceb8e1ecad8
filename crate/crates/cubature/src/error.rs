use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by rule construction, pricing and the adaptive driver.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on user-supplied parameters failed.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The least-squares design matrix lost column rank.
    #[error(
        "design matrix is rank deficient: numerical rank {rank} < {cols} columns (increase alpha)"
    )]
    RankDeficient { rank: usize, cols: usize },

    /// The integrand returned a non-finite value.
    #[error("integrand evaluation returned a non-finite value at {point:?}")]
    Evaluation { point: Vec<f64> },

    /// Equicorrelation parameter outside (-1/(d-1), 1).
    #[error("correlation {rho} outside the admissible interval ({lo}, 1) for d = {d}")]
    CorrelationOutOfRange { rho: f64, lo: f64, d: usize },

    /// Digital payoff requested without barrier levels.
    #[error("digital payoff requires barriers")]
    MissingBarriers,

    /// Closed-form formula requested outside its domain of validity.
    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    /// Covariance eigendecomposition produced a non-positive eigenvalue.
    #[error("covariance matrix has non-positive eigenvalue {value:.3e}")]
    NonPositiveEigenvalue { value: f64 },

    /// A configured memory or size budget would be exceeded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// I/O failure, with path context where available.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
