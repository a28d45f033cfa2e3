use thiserror::Error;

/// Errors raised by the solvers, quantizer builders and simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{what} is not symmetric positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { what: String, min_eig: f64 },

    #[error("{what} is not symmetric positive definite (min eigenvalue {min_eig:e})")]
    NotPd { what: String, min_eig: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("ill-conditioned Riccati step at k = {k} (reciprocal condition {rcond:e})")]
    IllConditioned { k: usize, rcond: f64 },

    #[error("invalid quantizer reduction matrix: {0}")]
    InvalidReduction(String),

    #[error("degenerate cell {cell} (probability {prob:e})")]
    DegenerateCell { cell: usize, prob: f64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partition gap at w = {0:?}")]
    PartitionGap(Vec<f64>),

    #[error("impossible observation: symbol {0} has zero marginal probability")]
    ImpossibleObservation(usize),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance too large for oracle: {nodes} scenario-tree nodes (limit {limit})")]
    TooLarge { nodes: u128, limit: u128 },

    #[error("numerical overflow at t = {t}")]
    Overflow { t: usize },

    #[error("run {run}: {source}")]
    Run {
        run: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
