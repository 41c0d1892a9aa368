use thiserror::Error;

/// Errors for the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("no valid type: {0}")]
    NoValidType(String),

    #[error("unbounded distance: {0}")]
    UnboundedDistance(String),

    #[error("asymmetric distance: {0}; wrap it with `symmetrize` first")]
    AsymmetricDistance(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("solver failed: {msg} (best bound found: {best})")]
    SolverFailure { msg: String, best: f64 },

    #[error("packing condition violated: {0}")]
    PackingViolated(String),

    #[error("sampler stalled: {0}")]
    SamplerStalled(String),

    #[error("rate condition violated: {0}")]
    RateConditionViolated(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
