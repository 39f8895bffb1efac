use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid kernel specification: {0}")]
    InvalidSpec(String),

    #[error("zero denominator Pochhammer factor at term {index}")]
    ZeroDenominator { index: u32 },

    #[error("quadrature missed tolerance {tol:e}: best estimate {estimate} with error {error:e}")]
    Quadrature { estimate: f64, error: f64, tol: f64 },

    #[error("spectrum truncation exceeded {cap} terms (tail bound {tail_bound:e})")]
    SpectrumCap { cap: usize, tail_bound: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    /// True for failures caused by exhausting a numerical budget
    /// (quadrature panels, spectrum length, iteration caps).
    pub fn is_budget_failure(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::SpectrumCap { .. } | Error::Range(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
