use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least {required} samples for {modes} modes, got {got}")]
    SampleCountTooSmall {
        modes: usize,
        required: usize,
        got: usize,
    },

    #[error("field is not real-valued: imaginary residue {residue:e} exceeds {tolerance:e}")]
    RealnessViolation { residue: f64, tolerance: f64 },

    #[error("kappa must be >= 1, got {0}")]
    KappaOutOfRange(f64),

    #[error("depth must be positive, got {0}")]
    NonpositiveDepth(f64),

    #[error("symbol `{name}` violates a(-n) = conj(a(n)) at n = {n}")]
    AsymmetricSymbol { name: String, n: i64 },

    #[error("gauge transform left mean {0:e} (inconsistent gauge parameters)")]
    MeanResidual(f64),

    #[error("blow-up detected at t = {time}: {reason}")]
    BlowupDetected { time: f64, reason: String },

    #[error("L + kappa is not positive definite at kappa = {0}")]
    NotPositiveDefinite(f64),

    #[error("no positive-definite kappa found up to {0}")]
    ThresholdNotFound(f64),

    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),

    #[error("requested {count} gaps from a {dim}x{dim} matrix")]
    CountExceedsDim { count: usize, dim: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
