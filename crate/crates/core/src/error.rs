use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("derivative order {requested} exceeds the net's budget of {budget}")]
    OrderExceeded { requested: usize, budget: usize },

    #[error("epsilon {0} outside (0, 1]")]
    EpsilonDomain(f64),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge on [{lo}, {hi}] at eps = {eps}")]
    QuadratureNonConvergence { lo: f64, hi: f64, eps: f64 },

    #[error("step size underflow integrating at x = {x}, eps = {eps}, t = {t}")]
    StepUnderflow { x: f64, eps: f64, t: f64 },

    #[error("domain violation at x = {x:?}, eps = {eps}: {reason}")]
    DomainViolation { x: Vec<f64>, eps: f64, reason: String },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("non-finite sample value {value} at eps = {eps}")]
    NonFiniteSample { eps: f64, value: f64 },

    #[error("sample epsilons must be strictly decreasing")]
    UnorderedSamples,

    #[error("neighborhood radius {0} too small to resolve")]
    NeighborhoodTooSmall(f64),

    #[error("inconclusive fiber: {0}")]
    Inconclusive(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
