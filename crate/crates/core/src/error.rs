use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid spectral table: {0}")]
    InvalidTable(String),

    #[error("unknown {kind} `{value}`")]
    Unknown { kind: &'static str, value: String },

    #[error("time must be finite and non-negative, got {0}")]
    InvalidTime(f64),

    #[error("t = {t} lies beyond the coefficient horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },

    #[error("quadrature for {what} did not converge (error estimate {abs_err:e})")]
    Quadrature { what: &'static str, abs_err: f64 },

    #[error("ODE step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("outside the weak-coupling regime: {0}")]
    Regime(String),

    #[error("trajectory grids differ: {0}")]
    GridMismatch(String),

    #[error("sampling step {step} exceeds the limit {limit}")]
    GridTooCoarse { step: f64, limit: f64 },

    #[error("horizon {horizon} is shorter than the required minimum {minimum}")]
    HorizonTooShort { horizon: f64, minimum: f64 },

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Quadrature { .. } | Error::StepUnderflow { .. } | Error::Regime(_) | Error::Io(_)
        )
    }
}
