use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid event series: {0}")]
    InvalidEvents(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible estimate: {0}")]
    Infeasible(String),

    #[error("inadmissible bandwidth plan: {0}")]
    InadmissiblePlan(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The simulation produced more events than the configured guard allows.
    #[error("explosion guard tripped: more than {max_events} events")]
    Explosion { max_events: usize },

    /// The conditional intensity exceeded the dominating rate used for thinning.
    #[error("dominating rate violated at t={t}: intensity {intensity} > bound {bound}")]
    DominationViolated { t: f64, intensity: f64, bound: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
