use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid deck size {0}: must be at least 1")]
    InvalidSize(usize),

    #[error("{what} = {value} is out of range 1..={n}")]
    IndexOutOfRange {
        what: &'static str,
        value: usize,
        n: usize,
    },

    #[error("choice sequence has length {len}, expected {n}")]
    LengthMismatch { len: usize, n: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("the closed-form marginal requires j != a (got j = a = {0})")]
    DiagonalEntry(usize),

    #[error("{0} is not supported by this operation")]
    UnsupportedKind(&'static str),

    #[error("resource limit: {engine} supports n <= {max}, got n = {n}")]
    ResourceLimit {
        engine: &'static str,
        max: usize,
        n: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for rejections caused by the size guards of the engines.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }
}
