use thiserror::Error;

use crate::sdp::SolverStatus;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 2")]
    InvalidDimension(usize),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("operator is not Hermitian (max |H - H^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid SDP problem: {0}")]
    InvalidProblem(String),

    #[error("solver returned {status:?}: {detail}")]
    Solver { status: SolverStatus, detail: String },

    #[error("certification failed: {}", .0.join("; "))]
    Certification(Vec<String>),

    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("error rate {q} is above the curve range (max {max}); refusing to extrapolate")]
    OutOfRange { q: f64, max: f64 },

    #[error("bound curve failed at q = {q}: {source}")]
    CurvePoint {
        q: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("bound curve is not monotone: drop of {drop:e} at q = {q}")]
    NonMonotone { q: f64, drop: f64 },

    #[error("invalid decoy settings: {0}")]
    InvalidSettings(String),

    #[error("single-photon yield in the {0} basis is zero; no key can be extracted")]
    ZeroYield(&'static str),

    #[error("curve cache checksum mismatch (stored {stored}, computed {computed})")]
    Checksum { stored: String, computed: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
