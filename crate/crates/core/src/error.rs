use std::path::{Path, PathBuf};

/// Everything that can go wrong across the crate, from input validation to
/// numerical failure. Exit-code mapping for the CLI lives in [`Error::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("weight at index {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weights sum to zero; cannot normalize")]
    AllZero,

    #[error("non-finite entry at index {index} ({value})")]
    NonFiniteEntry { index: usize, value: f64 },

    #[error("alphabet sizes differ: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("alphabet must have at least 2 symbols (got {n})")]
    AlphabetTooSmall { n: usize },

    #[error("sample size must be at least 1 (got {n})")]
    InvalidSampleSize { n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parameter leaves the feasible set: min_z(1 + r'psi(z)) = {min_value} <= 0")]
    InfeasibleParameter { min_value: f64 },

    #[error("partition cells overlap at symbol {symbol}")]
    OverlappingSets { symbol: usize },

    #[error("partition contains an empty cell (index {index})")]
    EmptySet { index: usize },

    #[error("partition cell {index} covers the whole alphabet; its indicator is constant")]
    DegeneratePartition { index: usize },

    #[error("features are linearly dependent (with the constant) on the reference support")]
    DependentFeatures,

    #[error("log-linear features must satisfy sum_z pi(z) psi_i(z) = 0; feature {index} has mean {mean}")]
    NotCentered { index: usize, mean: f64 },

    #[error("reference distribution must have full support (zero weight at symbol {symbol})")]
    NotFullSupport { symbol: usize },

    #[error("feature covariance is numerically singular (rcond {rcond:.3e})")]
    SingularCovariance { rcond: f64 },

    #[error("supremum not attained: solver ended with status {status}")]
    NotAttained { status: &'static str },

    #[error("probability must lie strictly between 0 and 1 (got {value})")]
    InvalidProbability { value: f64 },

    #[error("threshold must lie strictly between 0 and {max} (got {value})")]
    EtaOutOfRange { value: f64, max: f64 },

    #[error("distributions must have identical supports")]
    UnequalSupports,

    #[error("alphabet size must be odd (got {n})")]
    EvenAlphabet { n: usize },

    #[error("epsilon {epsilon} is too large: every reference weight must exceed it (min weight {min_weight})")]
    EpsilonTooLarge { epsilon: f64, min_weight: f64 },

    #[error("degrees of freedom must be at least 1")]
    InvalidDof,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    FileIo {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Attaches the offending path to a file operation's error.
pub(crate) fn with_path<T>(path: &Path, res: std::io::Result<T>) -> Result<T> {
    res.map_err(|source| Error::FileIo {
        path: path.to_path_buf(),
        source,
    })
}

impl Error {
    /// CLI exit code: 1 for validation and input errors, 2 for numerical
    /// failures discovered mid-computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SingularCovariance { .. } | Error::NotAttained { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
