use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid needs at least 4 points, got {0}")]
    GridTooSmall(usize),

    #[error("expected {expected} samples for the grid, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("claimed bound {bound} is violated: max modulus on the grid is {max}")]
    BoundViolated { bound: f64, max: f64 },

    #[error("window half-width {k} is too large for a {n}-point grid (need 2K+1 <= N)")]
    WindowTooLarge { k: usize, n: usize },

    #[error("grid too coarse: {n} points cannot certify degree {degree} (need N > pi*degree)")]
    GridTooCoarse { n: usize, degree: usize },

    #[error("Fejer degree {n} exceeds coefficient window {k}")]
    WindowExceeded { n: usize, k: usize },

    #[error("point {re}{im:+}i lies outside the closed unit disk")]
    Domain { re: f64, im: f64 },

    #[error("Hankel size {s} needs coefficients up to index -{need}, window only reaches -{k}")]
    InsufficientWindow { s: usize, need: usize, k: usize },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("certificate inconsistency: lower {lower} exceeds upper {upper} by more than {tol}")]
    CertificateInconsistency { lower: f64, upper: f64, tol: f64 },

    #[error("functions are sampled on different grids ({left} vs {right} points)")]
    GridMismatch { left: usize, right: usize },

    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sequence member {n} unavailable: {reason}")]
    IndexUnavailable { n: usize, reason: String },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
