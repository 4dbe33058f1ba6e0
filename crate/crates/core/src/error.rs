//! Error type shared by every module.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("pmf not exchangeable: {profile:?} has p={p}, permuted {permuted:?} has p={q}")]
    NotExchangeable { profile: Vec<usize>, permuted: Vec<usize>, p: f64, q: f64 },
    #[error("prior has empty support")]
    EmptySupport,
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("signal profile {0:?} has zero probability")]
    ZeroProbabilitySignal(Vec<usize>),
    #[error("strategy undefined for bidder {bidder} signal index {signal}")]
    UndefinedSignal { bidder: usize, signal: usize },
    #[error("bidders use different signal grids")]
    GridsDiffer,
    #[error("no feasible signal window after {halvings} halvings (last L = {last_len})")]
    WindowUnderflow { halvings: usize, last_len: f64 },
    #[error("coupling infeasible, max residual {residual}")]
    CouplingInfeasible { residual: f64 },
    #[error("value outside the signal window: {0}")]
    OutOfWindow(String),
    #[error("prior class {found} not accepted, expected {expected}")]
    WrongPriorClass { expected: String, found: String },
    #[error("epsilon {eps} must be below the smallest positive value {min_positive}")]
    EpsilonTooLarge { eps: f64, min_positive: f64 },
    #[error("alpha {alpha} outside [0, {max}]")]
    AlphaOutOfRange { alpha: f64, max: f64 },
    #[error("no feasible signal gap: admissible interval [{low}, {high}] shorter than gap {gap}")]
    NoFeasibleSignalGap { low: f64, high: f64, gap: f64 },
    #[error("prior is not a product measure (deviation {gap})")]
    NotProductPrior { gap: f64 },
    #[error("target (R={revenue}, B={surplus}) outside the feasible trapezoid")]
    OutsideTrapezoid { revenue: f64, surplus: f64 },
    #[error("i/o: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotNormalized { .. } => "NotNormalized",
            Error::NotExchangeable { .. } => "NotExchangeable",
            Error::EmptySupport => "EmptySupport",
            Error::InvalidPrior(_) => "InvalidPrior",
            Error::InvalidStructure(_) => "InvalidStructure",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::ZeroProbabilitySignal(_) => "ZeroProbabilitySignal",
            Error::UndefinedSignal { .. } => "UndefinedSignal",
            Error::GridsDiffer => "GridsDiffer",
            Error::WindowUnderflow { .. } => "WindowUnderflow",
            Error::CouplingInfeasible { .. } => "CouplingInfeasible",
            Error::OutOfWindow(_) => "OutOfWindow",
            Error::WrongPriorClass { .. } => "WrongPriorClass",
            Error::EpsilonTooLarge { .. } => "EpsilonTooLarge",
            Error::AlphaOutOfRange { .. } => "AlphaOutOfRange",
            Error::NoFeasibleSignalGap { .. } => "NoFeasibleSignalGap",
            Error::NotProductPrior { .. } => "NotProductPrior",
            Error::OutsideTrapezoid { .. } => "OutsideTrapezoid",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }

    /// True for errors caused by an infeasible construction rather than bad input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::WindowUnderflow { .. } | Error::CouplingInfeasible { .. } | Error::NoFeasibleSignalGap { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
