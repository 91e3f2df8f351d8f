use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("state norm {norm} deviates from 1 (use renormalisation to accept it)")]
    Normalization { norm: f64 },

    #[error("state file schema error: {0}")]
    Schema(String),

    #[error("|psi| too small at ({x}, {y}), T = {t}: velocity undefined near a node")]
    NodeProximity { x: f64, y: f64, t: f64 },

    #[error("step size underflow at T = {t} (required h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("too many rejected steps at T = {t}")]
    TooManyRejects { t: f64 },

    #[error("step budget exhausted at T = {t}")]
    StepBudget { t: f64 },

    #[error("newton jacobian singular")]
    JacobianSingular,

    #[error("phase winding ambiguous after maximum refinement")]
    AmbiguousWinding,

    #[error("finely tuned configuration: {0}")]
    FineTuned(String),

    #[error("node association ambiguous near T = {t}")]
    TrackingAmbiguity { t: f64 },

    #[error("highest energy shell is empty; reduce m")]
    EmptyShell,

    #[error("a zero of the shell polynomial lies too close to the unit circle")]
    ZeroNearCircle,

    #[error("no state with vorticity {target} found in {attempts} attempts")]
    AttemptsExhausted { target: i32, attempts: usize },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
