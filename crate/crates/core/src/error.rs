use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {got}")]
    ShapeMismatch { dim: usize, expected: usize, got: usize },

    #[error("dimension must be positive")]
    EmptyDimension,

    #[error("not Hermitian: entry ({row}, {col}) deviates from conj of ({col}, {row}) by {deviation:e}")]
    HermiticityViolation { row: usize, col: usize, deviation: f64 },

    #[error("trace is {trace} (must be 1)")]
    TraceViolation { trace: f64 },

    #[error("population ({index}, {index}) = {value} lies outside [0, 1]")]
    PopulationOutOfRange { index: usize, value: f64 },

    #[error("not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("amplitudes have squared norm {norm_sq} (must be 1)")]
    NormalizationViolation { norm_sq: f64 },

    #[error("complementarity residual {residual:e} exceeds {tolerance:e}")]
    ComplementarityViolation { residual: f64, tolerance: f64 },

    #[error("rank {rank} outside [1, {dim}]")]
    RankOutOfRange { dim: usize, rank: usize },

    #[error("dimension {dim} too small (need at least {min})")]
    DimensionTooSmall { dim: usize, min: usize },

    #[error("parameter {name} = {value} out of range: {reason}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("n-copy dispersion evaluated to {value:e} (relative to scale {scale:e})")]
    NegativeDispersion { value: f64, scale: f64 },

    #[error("explicit tensor power would have dimension {dim} > {limit}")]
    DimensionGuardExceeded { dim: u128, limit: usize },

    #[error("total ECS count {total} is smaller than coherent count {coherent}")]
    BufferSmallerThanCoherent { total: u64, coherent: u64 },

    #[error("no interior maximum of the dispersion on the temperature grid")]
    FlatObjective,

    #[error("invalid config field `{field}`: {reason}")]
    ConfigInvalid { field: String, reason: String },

    #[error("cannot write {}: {source}", path.display())]
    OutputUnwritable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot read {}: {source}", path.display())]
    InputUnreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::ConfigInvalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
