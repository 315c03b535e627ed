use std::fmt;

use thiserror::Error;

/// Which side of a pulse ran off the end of the sampled window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Leading,
    Trailing,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Leading => f.write_str("leading"),
            Side::Trailing => f.write_str("trailing"),
        }
    }
}

/// Coarse classification used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad parameters or configuration.
    Validation,
    /// Malformed or inconsistent input data.
    Data,
    /// Non-convergence, divergence or a degenerate numerical problem.
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("steady state is not unique: linear system has a {nullity}-dimensional null space")]
    DegenerateSteadyState { nullity: usize },

    #[error("ground-state coherence undefined: {0}")]
    UndefinedCoherence(&'static str),

    #[error("integration diverged at t = {time} (1/Γ12): {detail}; try a smaller step")]
    IntegrationDiverged { time: f64, detail: String },

    #[error("pulse truncated: no half-maximum crossing on the {side} edge")]
    TruncatedPulse { side: Side },

    #[error("sweep point {index} (value {value}) failed: {source}")]
    SweepPoint {
        index: usize,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("trace has {found} samples, at least {needed} required")]
    ShortTrace { found: usize, needed: usize },

    #[error("sample {index} is {value}; fit data must be positive")]
    NonPositiveSample { index: usize, value: f64 },

    #[error("degenerate fit input: {0}")]
    DegenerateFit(&'static str),

    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("line {line}: time column is not strictly increasing")]
    NonMonotonicTime { line: usize },

    #[error("line {line}: unsupported column units `{found}` (expected `{expected}`)")]
    UnitMismatch {
        line: usize,
        found: String,
        expected: &'static str,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter { .. } | Error::UndefinedCoherence(_) => ErrorKind::Validation,
            Error::DegenerateSteadyState { .. }
            | Error::IntegrationDiverged { .. }
            | Error::TruncatedPulse { .. }
            | Error::DegenerateFit(_) => ErrorKind::Numerical,
            Error::ShortTrace { .. }
            | Error::NonPositiveSample { .. }
            | Error::MalformedRow { .. }
            | Error::NonMonotonicTime { .. }
            | Error::UnitMismatch { .. } => ErrorKind::Data,
            Error::SweepPoint { source, .. } => source.kind(),
            Error::Io(_) => ErrorKind::Io,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
