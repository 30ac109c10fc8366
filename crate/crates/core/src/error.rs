use thiserror::Error;

use crate::coupling::TraceStates;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("degenerate interfacial weights: d1*m1 + d2*m2 = 0")]
    DegenerateWeights,

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("degenerate polynomial: {0}")]
    DegeneratePolynomial(&'static str),

    #[error("no real solution: {0}")]
    NoRealSolution(&'static str),

    #[error("singular denominator in {0}")]
    SingularDenominator(&'static str),

    #[error("unphysical root: alpha1L = {0}")]
    UnphysicalRoot(f64),

    #[error("coupling solver failed: {reason}; traces: {traces:?}")]
    SolverFailure { reason: String, traces: Box<TraceStates> },

    #[error("inadmissible state in cell {cell} at t = {time:e}: {reason}")]
    InadmissibleCell { cell: i64, time: f64, reason: String },

    #[error("degenerate time step: {0}")]
    DegenerateTimeStep(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("resolution mismatch: {0}")]
    ResolutionMismatch(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: std::path::PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
