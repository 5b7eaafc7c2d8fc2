use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("alpha = {alpha} is outside [0, M = {m}]; the integral equations assume nonnegative spectra (alpha <= M)")]
    AlphaOutOfRange { alpha: f64, m: f64 },

    #[error("fixed-point iteration did not converge in {iterations} iterations (last update {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("|1 + a| = {value:e} at the left edge of the grid; analyticity assumptions violated")]
    PlateauInstability { value: f64 },

    #[error("level j = {j} sits at theta = {theta}, outside the grid interior; widen theta_max")]
    LevelOutsideGrid { j: usize, theta: f64 },

    #[error("root not bracketed: {0}")]
    NoSignChange(String),

    #[error("evaluation too close to a pole: {0}")]
    PoleProximity(String),

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error("energy {energy} outside the validated region: {reason}")]
    OutsideValidRegion { energy: f64, reason: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
