use thiserror::Error;

/// Errors produced by the library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge after {evals} evaluations (error estimate {estimate:e})")]
    Convergence {
        what: &'static str,
        evals: usize,
        estimate: f64,
    },

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("lateral amplitude vanishes (null regime)")]
    NullAmplitude,

    #[error("corrugation height {max_height:e} m exceeds 0.1 z0 (z0 = {z0:e} m)")]
    PerturbativityViolation { max_height: f64, z0: f64 },

    #[error("profile has no modes and no grid")]
    EmptyProfile,

    #[error("point ({x:e}, {y:e}) lies outside the sampled grid")]
    OutOfGrid { x: f64, y: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Json(_) | Error::Csv(_) | Error::Io(_) => 2,
            Error::Domain(_) | Error::EmptyProfile | Error::OutOfGrid { .. } => 2,
            Error::Convergence { .. } | Error::NoSignChange { .. } | Error::NullAmplitude => 3,
            Error::PerturbativityViolation { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
