use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("not disjoint: edges {first} and {second} share vertices {shared:?}")]
    NotDisjoint {
        first: String,
        second: String,
        shared: Vec<String>,
    },

    #[error("desk-scale exceeded: {what} is {actual}, limit {limit}")]
    GuardExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("search budget of {limit} node expansions exhausted")]
    BudgetExceeded { limit: u64 },

    #[error("input is totally unimodular")]
    InputIsTu,

    #[error("internal consistency failure in {lemma}: {detail}")]
    Internal { lemma: &'static str, detail: String },
}

impl Error {
    pub(crate) fn internal(lemma: &'static str, detail: impl Into<String>) -> Self {
        Error::Internal {
            lemma,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors caused by a guard or budget rather than by the input.
    pub fn is_limit(&self) -> bool {
        matches!(self, Error::GuardExceeded { .. } | Error::BudgetExceeded { .. })
    }
}
