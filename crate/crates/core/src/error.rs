//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by mean evaluation, quadrature and Hardy computations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A value left the domain interval of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed arguments: empty ranges, mismatched lengths, bad weights.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A user-supplied deviation failed one of the deviation axioms.
    #[error("deviation axiom violated: {0}")]
    AxiomViolation(String),

    /// The root bracket did not change sign.
    #[error("bracket failure: residual {lo_residual} at {lo}, {hi_residual} at {hi}")]
    BracketFailure {
        lo: f64,
        hi: f64,
        lo_residual: f64,
        hi_residual: f64,
    },

    /// Bisection ran out of iterations before reaching the tolerance.
    #[error("root finder hit the iteration cap; last estimate {last}, bracket width {width}")]
    IterationLimit { last: f64, width: f64 },

    /// Quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge (residual {residual:e})")]
    QuadratureNonConvergence { residual: f64 },

    /// Refinement indicates the integral is infinite.
    #[error("integrand is not integrable: {0}")]
    Integrability(String),

    /// A sampled function value escaped the declared range.
    #[error("value {value} at t = {t} lies outside the declared range [{lo}, {hi}]")]
    RangeViolation {
        t: f64,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Sampled values contradict the declared monotonicity.
    #[error("declared monotonicity violated near t = {0}")]
    MonotonicityViolation(f64),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by the caller's arguments or input files, as
    /// opposed to numerical failures.
    pub fn is_argument_error(&self) -> bool {
        matches!(self, Error::Argument(_) | Error::Io(_) | Error::Parse(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
