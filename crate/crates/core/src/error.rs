use thiserror::Error;

/// Errors raised by model construction, simulation, the exact oracle and the estimator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("stationary distribution is not unique (multiple closed classes)")]
    NonUniqueStationary,

    #[error("stationary iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("capacity exceeded: {what} needs {needed}, limit is {limit}")]
    CapacityExceeded {
        what: &'static str,
        needed: usize,
        limit: usize,
    },

    #[error("no ancestral event has positive weight for offspring type {offspring} at {config}")]
    ImpossibleAncestry { offspring: usize, config: String },

    #[error("event {event} cannot be applied to {config}")]
    InvalidEvent { event: String, config: String },

    #[error("numerical overflow: {0}")]
    NumericalOverflow(String),

    #[error("stationary probability of type {type_index} is zero but the configuration carries it")]
    DegenerateStationary { type_index: usize },

    #[error("replicate exceeded the event cap of {cap}")]
    IterationCap { cap: u64 },

    #[error("singular linear system at level {level}")]
    SingularSystem { level: u32 },

    #[error("level distribution has size {found}, expected {expected}")]
    SizeMismatch { expected: u32, found: u32 },

    #[error("empty input")]
    EmptyInput,

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("repeat {repeat} failed at replicate {replicate}: {source}")]
    ReplicateFailed {
        repeat: usize,
        replicate: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
