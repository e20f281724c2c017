use thiserror::Error;

/// Errors raised by algebra construction, evaluation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension must be positive")]
    EmptyAlgebra,

    #[error("structure constant index ({i}, {j}, {k}) out of range for dimension {dim}")]
    IndexOutOfRange { i: usize, j: usize, k: usize, dim: usize },

    #[error("duplicate structure constant for ({i}, {j}, {k})")]
    DuplicateConstant { i: usize, j: usize, k: usize },

    #[error("bilinear form is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("bilinear form is degenerate")]
    Degenerate,

    #[error("metric is not invariant: defect {defect} at basis triple {witness:?}")]
    NotInvariant { defect: f64, witness: (usize, usize, usize) },

    #[error("numeric mode mismatch")]
    ModeMismatch,

    #[error("vectors are linearly dependent")]
    LinearDependence,

    #[error("plane is degenerate for the metric (gram = {gram})")]
    DegeneratePlane { gram: f64 },

    #[error("metric is not positive definite")]
    NotEuclidean,

    #[error("form is not positive definite")]
    NotPositiveDefinite,

    #[error("element is isotropic")]
    Isotropic,

    #[error("tensor fails {class} symmetry (defect {defect})")]
    Symmetry { class: &'static str, defect: f64 },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("spectrum is not real")]
    NonRealSpectrum,

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
