use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("index {index} out of range for {len} particles")]
    AnchorOutOfRange { index: usize, len: usize },

    #[error("gauge field has no samples")]
    EmptyGaugeField,

    #[error("invalid gauge field: {0}")]
    InvalidGaugeField(String),

    #[error("path needs at least {needed} nodes, got {got}")]
    TooFewNodes { needed: usize, got: usize },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("end time {t1} must exceed start time {t0}")]
    TimeOrder { t0: f64, t1: f64 },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("cross-check mismatch in {what}: {diff:e} exceeds {tol:e}")]
    CrossCheck { what: &'static str, diff: f64, tol: f64 },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("time step must be positive")]
    NonPositiveStep,

    #[error("time step too large for the spectral bound: dt*E_max/hbar = {0:.3} >= pi")]
    Cfl(f64),

    #[error("boost displacement {displacement} exceeds half the box ({half_box})")]
    BoostTooLarge { displacement: f64, half_box: f64 },

    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    #[error("vertical direction: the time component must be nonzero")]
    VerticalDirection,

    #[error("unsupported model: {0}")]
    Unsupported(String),

    #[error("memory budget exceeded: {needed} entries > {budget}")]
    Budget { needed: usize, budget: usize },

    #[error("frame change needs distinct anchors")]
    SameAnchor,

    #[error("io: {0}")]
    Io(String),

    #[error("format: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
