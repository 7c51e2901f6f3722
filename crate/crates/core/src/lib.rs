//! Certified phase-error-rate bounds for two-basis qudit QKD protocols in which
//! Alice transmits only a subset of the monitoring (Fourier) basis states.
//!
//! The crate is organised bottom-up:
//!
//! * [`operators`] builds basis states, projectors, error operators and the
//!   equality-constraint system for a given dimension and monitoring subset.
//! * [`sdp`] is a small dense primal-dual interior-point solver for complex
//!   Hermitian SDPs, returning a dual (upper) bound with a certificate.
//! * [`bound`] turns constraint systems into phase-error bounds and tabulated
//!   bound curves with conservative lookup and a checksummed JSON cache.
//! * [`keyrate`] holds the entropy, secret-key-fraction and three-intensity
//!   decoy estimators.
//! * [`channel`] simulates the lossy channel, detector saturation and the
//!   per-loss intensity optimisation.

pub mod bound;
pub mod channel;
pub mod error;
pub mod keyrate;
pub mod linalg;
pub mod operators;
pub mod sdp;

pub use bound::{bound_curve, lookup_bound, phase_error_bound, BoundCurve, BoundPoint};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, HermitianOperator};
pub use operators::{build_constraints, ConstraintSet, ProtocolConfig, Subset};
pub use sdp::{solve_max, SdpProblem, SdpSolution, SolverSettings, SolverStatus};
