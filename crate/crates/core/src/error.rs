use thiserror::Error;

/// Broad failure class, used by front-ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Inputs outside the physical domain of a model.
    PhysicsDomain,
    /// A numerical procedure failed to produce a trustworthy answer.
    Numerical,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resonant channel {0}: zero energy defect invalidates the van der Waals expansion")]
    Resonance(String),

    #[error("unstable quadratic form: {0}")]
    Unstable(String),

    #[error("finite-difference step {h} is too large for separation {r} (need h < r/10)")]
    StepSize { h: f64, r: f64 },

    #[error("dressing fraction f = {0} is outside the weak-dressing regime (0, 1)")]
    DressingRegime(f64),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("root not bracketed: {0}")]
    NoBracket(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::NoBracket(_) | Error::NonFinite(_) => ErrorCategory::Numerical,
            _ => ErrorCategory::PhysicsDomain,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
