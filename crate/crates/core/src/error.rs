use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a Gaussian state needs at least one mode")]
    NoModes,
    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeOutOfRange { index: usize, n_modes: usize },
    #[error("beamsplitter needs two distinct modes, got {0} twice")]
    SameMode(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("squeezing parameter must be finite and non-negative, got {0}")]
    InvalidSqueezing(f64),
    #[error("teleportation gain must be finite and positive, got {0}")]
    InvalidGain(f64),
    #[error("efficiency {0} outside [0, 1]")]
    InvalidEfficiency(f64),
    #[error("covariance matrix violates the uncertainty relation (min eigenvalue {0:e})")]
    Unphysical(f64),
    #[error("matrix is not symplectic (deviation {0:e})")]
    NotSymplectic(f64),
    #[error("channel is not completely positive (min eigenvalue {0:e})")]
    NotCompletelyPositive(f64),
    #[error("procedure is not an affine Gaussian channel (held-out deviation {0:e})")]
    NotAffine(f64),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("elimination left an off-diagonal residual of {0:e}")]
    EliminationFailed(f64),
    #[error("mesh depth {depth} exceeds schedule depth {k}")]
    DepthOverflow { depth: usize, k: usize },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("{what} exceeds the desk-scale cap of {cap} (got {got})")]
    ScaleCap { what: &'static str, cap: usize, got: usize },
    #[error("invalid input configuration: {0}")]
    InvalidInput(String),
    #[error("invalid resource parameter: {0}")]
    InvalidParameter(String),
    #[error("wall clock {wall_clock}s does not exceed the single-experiment time {tau}s")]
    InfeasibleWallClock { wall_clock: f64, tau: f64 },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
