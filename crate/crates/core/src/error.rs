use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("fewer than {needed} nodes per half-strip (got {got})")]
    TooFewNodes { needed: usize, got: usize },

    #[error("negative smoothing time {0}")]
    NegativeTime(f64),

    #[error("singular per-mode system at wavenumber index {mode}, time step {step} (pivot {pivot:e})")]
    SingularMode { mode: usize, step: usize, pivot: f64 },

    #[error("incompatible initial data: {0}")]
    Incompatible(String),

    #[error("fixed point did not converge after {iterations} iterations (last update {last_update:e})")]
    NoConvergence { iterations: usize, last_update: f64 },

    #[error("slope bound violated on the mollifier window: max |h'| = {max_slope} > 1 - delta = {bound}")]
    SlopeBound { max_slope: f64, bound: f64 },

    #[error("direction perturbs the initial interface; only (u0, c) directions are supported")]
    InterfaceDirection,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("config: {0}")]
    Config(String),

    #[error("unknown study `{0}`")]
    UnknownStudy(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
