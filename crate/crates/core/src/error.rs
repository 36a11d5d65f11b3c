use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the toolkit. Messages carry the owning module as a prefix.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("trace: line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("trace: line {line}: negative frame size {value}")]
    NegativeSize { line: usize, value: String },
    #[error("trace: empty input")]
    EmptyTrace,
    #[error("{context}: series has zero variance")]
    ZeroVariance { context: &'static str },
    #[error("{context}: series too short (need at least {needed}, got {got})")]
    TooShort {
        context: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("{context}: invalid parameter: {reason}")]
    InvalidParameter { context: &'static str, reason: String },
    #[error("sam: insufficient history (need {needed} values and {needed_eps} innovations)")]
    InsufficientHistory { needed: usize, needed_eps: usize },
    #[error("estimation: non-finite objective at parameters {params:?}")]
    NonFiniteObjective { params: Vec<f64> },
    #[error("estimation: near-singular autocovariance system at order {order}")]
    SingularSystem { order: usize },
    #[error("stats: feature column '{name}' has zero variance")]
    ZeroVarianceFeature { name: String },
    #[error("scheduler: {reason}")]
    Scheduler { reason: String },
}

pub(crate) fn invalid(context: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        context,
        reason: reason.into(),
    }
}

impl Error {
    /// Stable variant name, for machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedRow { .. } => "malformed_row",
            Error::NegativeSize { .. } => "negative_size",
            Error::EmptyTrace => "empty_trace",
            Error::ZeroVariance { .. } => "zero_variance",
            Error::TooShort { .. } => "too_short",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::InsufficientHistory { .. } => "insufficient_history",
            Error::NonFiniteObjective { .. } => "non_finite_objective",
            Error::SingularSystem { .. } => "singular_system",
            Error::ZeroVarianceFeature { .. } => "zero_variance_feature",
            Error::Scheduler { .. } => "scheduler",
        }
    }

    /// Module that raised the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::MalformedRow { .. } | Error::NegativeSize { .. } | Error::EmptyTrace => "trace",
            Error::ZeroVariance { context }
            | Error::TooShort { context, .. }
            | Error::InvalidParameter { context, .. } => context,
            Error::InsufficientHistory { .. } => "sam",
            Error::NonFiniteObjective { .. } | Error::SingularSystem { .. } => "estimation",
            Error::ZeroVarianceFeature { .. } => "stats",
            Error::Scheduler { .. } => "scheduler",
        }
    }
}
