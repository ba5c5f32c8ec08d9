use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("expected {expected} entries for the given shape, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("operation requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian: max deviation {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },
    #[error("negative power of a matrix whose smallest eigenvalue {min_eigenvalue:e} is below the definiteness floor")]
    SingularForNegativePower { min_eigenvalue: f64 },
    #[error("matrix has a negative eigenvalue {eigenvalue:e} beyond the clipping floor")]
    NotPositiveSemidefinite { eigenvalue: f64 },
    #[error("input is singular or not positive definite: {0}")]
    SingularInput(String),
    #[error("operand is not unitary: defect {defect:e}")]
    NotUnitary { defect: f64 },
    #[error("instance is not commuting: {0}")]
    NotCommuting(String),
    #[error("invalid norm specification: {0}")]
    InvalidSpec(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("invalid spectrum law: {0}")]
    InvalidSpectrumLaw(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("report schema version {found} is not supported (expected {expected})")]
    SchemaVersionMismatch { found: u32, expected: u32 },
    #[error("malformed report: {0}")]
    MalformedReport(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
