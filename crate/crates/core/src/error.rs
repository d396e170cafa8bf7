use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("singular matrix: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("rank deficient: rank {rank} < required {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("matrix is not skew-symmetric (defect {0:.3e})")]
    NotSkewSymmetric(f64),

    #[error("invalid tolerance {name} = {value}: must lie in [0, 1)")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("index out of range: need 1 <= i < j <= m, got i = {i}, j = {j}, m = {m}")]
    IndexOutOfRange { i: usize, j: usize, m: usize },

    #[error("isotropic {k}-planes exist only for 1 <= k <= floor(m/2) = {max} (m = {m})")]
    DimensionBound { k: usize, m: usize, max: usize },

    #[error("form is degenerate: rank {rank} < dimension {m}")]
    DegenerateForm { rank: usize, m: usize },

    #[error("plane is not isotropic: residual {residual:.3e} exceeds {tol:.3e}")]
    NotIsotropic { residual: f64, tol: f64 },

    #[error("plane admits no normal form [I; M1; M2]: {0}")]
    NotNormalizable(String),

    #[error("pair is outside the generic locus: {0}")]
    NotGeneric(String),

    #[error("certification failed: {what} residual {residual:.3e} exceeds {tol:.3e}")]
    Uncertified {
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
