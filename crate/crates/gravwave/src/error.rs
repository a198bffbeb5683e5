use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("gauge error: zero mode {zero_mode:e} exceeds 1e-8 of the L2 norm {norm:e}")]
    Gauge { zero_mode: f64, norm: f64 },

    #[error("surface slope sup|h'| = {slope} is outside the series regime (< 1)")]
    SlopeTooLarge { slope: f64 },

    #[error("density series does not converge: correction of degree {degree} shrank only by {ratio:.3}")]
    NonConvergent { degree: usize, ratio: f64 },

    #[error("non-finite value in {what} at t = {t}")]
    NonFinite { what: &'static str, t: f64 },

    #[error("{key} {msg} (line {line})")]
    Config { line: usize, key: String, msg: String },

    #[error("{key} {msg}")]
    ConfigValue { key: String, msg: String },

    #[error("duplicate key {key} on lines {first} and {second}")]
    DuplicateKey { key: String, first: usize, second: usize },

    #[error("snapshot: {0}")]
    Snapshot(String),

    #[error("diagnostics: {0}")]
    Diagnostics(String),

    #[error("need at least {need} samples, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("time must increase: {prev} then {next}")]
    NonMonotoneTime { prev: f64, next: f64 },

    #[error("phase unwrap failed at t = {t}: jump of {jump:.3} rad")]
    PhaseUnwrap { t: f64, jump: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by bad input rather than by a run going wrong.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NonFinite { .. } | Error::NonConvergent { .. } | Error::SlopeTooLarge { .. }
        )
    }
}
