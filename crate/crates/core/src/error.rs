use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("structure constants are not antisymmetric at ({i}, {j}, {k})")]
    NotAntisymmetric { i: usize, j: usize, k: usize },

    #[error("Jacobi identity violated: residual {0:e}")]
    Jacobi(f64),

    #[error("Gram matrix is not symmetric positive-definite")]
    NotPositiveDefinite,

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("degree {degree} is out of range for dimension {dim}")]
    InvalidDegree { degree: usize, dim: usize },

    #[error("the symmetrized formulation is only defined for 2-forms (got degree {0})")]
    InvalidFormulation(usize),

    #[error("form fails the CKY residual check (residual {0:e})")]
    NotCky(f64),

    #[error("center has dimension {0}; at least 2 is required")]
    CenterTooSmall(usize),

    #[error("S singular")]
    SingularEndomorphism,

    #[error("S is not skew-symmetric (residual {0:e})")]
    NotSkew(f64),

    #[error("S is not parallel (residual {0:e})")]
    NotParallel(f64),

    #[error("mu is not closed (residual {0:e})")]
    NotClosed(f64),

    #[error("parameter constraint violated: {0}")]
    Constraint(String),

    #[error("unknown family '{0}'")]
    UnknownFamily(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
