use thiserror::Error;

use crate::cloning::FeasibilityReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("labels do not align: {0}")]
    LabelMismatch(String),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: deviation {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("diagonal entry {index} is {value}, expected 1")]
    NotUnitDiagonal { index: usize, value: f64 },

    #[error("trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },

    #[error("matrix is not unitary: deviation {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("set sizes differ: {left} vs {right}")]
    CardinalityMismatch { left: usize, right: usize },

    #[error(
        "states `{first}` and `{second}` are orthogonal within tolerance: \
         |overlap| = {modulus:e} < {min_overlap:e}"
    )]
    OrthogonalPair {
        first: String,
        second: String,
        modulus: f64,
        min_overlap: f64,
    },

    #[error("overlap powers underflow for {copies} copies: use fewer copies or a larger minimum overlap")]
    OverlapUnderflow { copies: usize },

    #[error("{name} = {value} is out of range, expected {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("transformation is infeasible: criterion minimum eigenvalue {:e}", .0.min_eigenvalue)]
    Infeasible(Box<FeasibilityReport>),

    #[error("Gram matrices differ by {max_deviation:e}")]
    GramMismatch { max_deviation: f64 },

    #[error("environment dimension {env_dim} is too small for system dimension {dim}")]
    EnvironmentTooSmall { dim: usize, env_dim: usize },

    #[error("triple-product phase is undefined: overlap {pair} vanishes")]
    UndefinedPhase { pair: &'static str },

    #[error("invariants are infeasible: Gram determinant {det:e}")]
    InfeasibleInvariants { det: f64 },

    #[error("{what} failed verification: residual {residual:e}")]
    Verification { what: &'static str, residual: f64 },

    #[error("invalid input at `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
