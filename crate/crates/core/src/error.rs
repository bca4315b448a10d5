use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid trial distribution: {0}")]
    InvalidDistribution(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("size limit exceeded for {what}: requested {requested}, limit is {limit}")]
    SizeLimit {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("work budget exceeded: query needs {required} state-transitions, budget is {budget}")]
    Budget { required: u64, budget: u64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
