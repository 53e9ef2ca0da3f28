use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A field of an instance, type, or profile violates its invariant.
    /// `path` names the offending field, e.g. `agents[2].alpha`.
    #[error("invalid {path}: {reason}")]
    Invalid { path: String, reason: String },

    #[error("agent index {index} out of range (n = {n})")]
    AgentOutOfRange { index: usize, n: usize },

    /// Quality evaluated at a price below the displayed minimum.
    #[error("quality evaluated outside its domain: p = {price} < p_min = {min_price}")]
    QualityDomain { price: f64, min_price: f64 },

    #[error("inconsistent allocation: {0}")]
    InconsistentAllocation(String),

    #[error("{what} of size {size} exceeds the guard of {limit}")]
    GuardExceeded { what: String, size: u128, limit: u128 },

    #[error("diagonal of the quality model is not differentiable at p = {price}")]
    NotDifferentiable { price: f64 },

    #[error("type inference failed for agent {agent}: {reason}")]
    Inference { agent: usize, reason: String },

    #[error("{construction}: parameter constraint violated: {constraint}")]
    Constraint { construction: String, constraint: String },

    #[error("mechanism {0} is not supported here")]
    UnsupportedMechanism(String),

    #[error("load failed at {path}: {reason}")]
    Load { path: String, reason: String },
}

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid { path: path.into(), reason: reason.into() }
    }
}
