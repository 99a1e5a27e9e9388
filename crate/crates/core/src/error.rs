use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("negative entry in matrix {matrix} at ({row}, {col})")]
    NegativeEntry { matrix: usize, row: usize, col: usize },

    #[error("non-finite entry in matrix {matrix} at ({row}, {col})")]
    NonFiniteEntry { matrix: usize, row: usize, col: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix set is empty")]
    EmptySet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration guard exceeded: {words} words (limit {limit})")]
    GuardExceeded { words: f64, limit: f64 },

    #[error("global period exceeds 2^63-1")]
    PeriodOverflow,

    #[error("upper bound requested at length {0}, which was capacity-pruned")]
    RequiresExact(usize),

    #[error("sequence is not supermultiplicative: a({m}+{n}) < a({m})*a({n})")]
    NotSupermultiplicative { m: usize, n: usize },

    #[error("power iteration did not converge after {iterations} iterations (best estimate {best})")]
    NoConvergence { iterations: usize, best: f64 },

    #[error("need at least {needed} usable points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
}

impl Error {
    /// Input validation failures as opposed to resource/guard failures.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::GuardExceeded { .. } | Error::PeriodOverflow | Error::NoConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
