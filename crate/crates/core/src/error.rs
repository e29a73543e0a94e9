use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimensions must be positive")]
    ZeroDimension,

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("cycle index {k} out of range for dimension {n}")]
    CycleOutOfRange { k: usize, n: usize },

    #[error("invalid cycle selection: {0}")]
    InvalidSelection(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("the zero matrix has no cycle weights")]
    ZeroMatrix,

    #[error("cycle has zero energy")]
    ZeroCycle,

    #[error("dominance identity violated: direct s = {direct}, weighted sum = {weighted}")]
    DominanceMismatch { direct: f64, weighted: f64 },

    #[error("eigensolver did not converge")]
    EigenSolverFailed,

    #[error("matrix is numerically defective (eigenvector condition {condition:e})")]
    Defective { condition: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("conjugate gradient breakdown at iteration {iteration}: p^H A p = {curvature:e}")]
    Breakdown { iteration: usize, curvature: f64 },

    #[error("invalid matrix spec: {0}")]
    InvalidSpec(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad numerics rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigenSolverFailed
                | Error::Defective { .. }
                | Error::Singular(_)
                | Error::Breakdown { .. }
                | Error::DominanceMismatch { .. }
                | Error::ZeroCycle
                | Error::ZeroMatrix
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
