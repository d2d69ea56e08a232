use thiserror::Error;

/// Errors raised by the computational modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square with dimension >= 2, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not unimodular: det = {det}")]
    NotUnimodular { det: String },
    #[error("matrix is not hyperbolic: eigenvalue modulus {modulus} within {tolerance} of 1")]
    NotHyperbolic { modulus: f64, tolerance: f64 },
    #[error("period {n} has {points} periodic points, over the enumeration budget of {budget}")]
    PeriodTooLarge { n: u32, points: String, budget: u64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("band {band} retains {modes} modes, over the cap of {cap}")]
    BandBudgetExceeded { band: u32, modes: usize, cap: usize },
    #[error("coefficient schedule too flat: alpha = {alpha} must exceed 1")]
    ScheduleTooFlat { alpha: f64 },
    #[error("too few samples: got {got}, need at least {min}")]
    TooFewSamples { got: usize, min: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::NotUnimodular { .. } => "NotUnimodular",
            Error::NotHyperbolic { .. } => "NotHyperbolic",
            Error::PeriodTooLarge { .. } => "PeriodTooLarge",
            Error::Degenerate(_) => "Degenerate",
            Error::BandBudgetExceeded { .. } => "BandBudgetExceeded",
            Error::ScheduleTooFlat { .. } => "ScheduleTooFlat",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }

    /// Configuration errors are rejected before any computation starts.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_) | Error::NotSquare { .. } | Error::ScheduleTooFlat { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
