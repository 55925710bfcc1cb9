use thiserror::Error;

/// Errors produced by the spectral, degeneracy, symmetry and filling routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix data has length {len}, expected {expected}")]
    BadLength { len: usize, expected: usize },

    #[error("matrix is not symmetric at ({row}, {col}): {upper} vs {lower}")]
    Asymmetric {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("non-finite value {value} at ({row}, {col})")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("function returned non-finite value {value} at {at}")]
    NonFiniteFunction { at: f64, value: f64 },

    #[error("finite-difference step must be positive and finite, got {0}")]
    BadStep(f64),

    #[error("lambda = {lambda} lies outside the model domain ({lo}, {hi})")]
    OutOfDomain { lambda: f64, lo: f64, hi: f64 },

    #[error(
        "ambiguous eigenvector matching for state {state} between lambda = {from} and {to} \
         (best overlaps {best:.9} and {second:.9}); use a finer lambda step"
    )]
    AmbiguousTracking {
        state: usize,
        from: f64,
        to: f64,
        best: f64,
        second: f64,
    },

    #[error("vector is not normalized: norm^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("state indices must differ, got m = n = {0}")]
    SameIndex(usize),

    #[error("state index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error(
        "tracking of states {m} and {n} failed near lambda = {lambda}: {reason}; \
         build the HFT-consistent basis first or reduce the step"
    )]
    TrackingFailure {
        m: usize,
        n: usize,
        lambda: f64,
        reason: String,
    },

    #[error("particle number {n_particles} out of range 1..={dim}")]
    FillingOutOfRange { n_particles: usize, dim: usize },

    #[error("no degeneracy at the occupation frontier at lambda = {lambda}")]
    NoFrontierDegeneracy { lambda: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error("state {state} matches no irrep (characters {characters:?})")]
    MixedSymmetry { state: usize, characters: Vec<f64> },

    #[error("model '{0}' carries no symmetry representation")]
    NoSymmetry(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
