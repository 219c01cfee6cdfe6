use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quantile at {0} is infinite")]
    InfiniteQuantile(f64),

    #[error("root is not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NotBracketed {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("shape mismatch: {p_values} p-values but {weights} weights")]
    Shape { p_values: usize, weights: usize },

    #[error("method misuse: {0}")]
    MethodMisuse(String),

    #[error("brute-force closed testing is limited to {max} hypotheses, got {n}")]
    Capacity { n: usize, max: usize },

    #[error(
        "not enough rejections to form a ratio: {combination} combination, {bonferroni} Bonferroni out of {replications}"
    )]
    InsufficientEvents {
        combination: u64,
        bonferroni: u64,
        replications: u64,
    },

    #[error("invalid model: {0}")]
    Model(String),

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
