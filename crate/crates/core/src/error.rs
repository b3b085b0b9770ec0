use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge for eigenvalue {index} within {sweeps} sweeps")]
    NoConvergence { index: usize, sweeps: usize },

    #[error("stationarity condition has no sign change within {doublings} doublings of r")]
    RootNotBracketed { doublings: usize },

    #[error("no avoided crossing between levels {lo} and {hi}: gap is monotone on [{from}, {to}]")]
    NoCrossing { lo: usize, hi: usize, from: f64, to: f64 },

    #[error("not enough data for {what}: need {needed}, got {got}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("scan failed at p = {p}: {source}")]
    ScanFailed {
        p: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors raised while validating the physical model.
    pub fn is_model_error(&self) -> bool {
        matches!(self, Error::InvalidModel(_))
    }

    /// True for failures of an iterative numerical kernel.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::NoConvergence { .. } | Error::RootNotBracketed { .. } => true,
            Error::ScanFailed { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
