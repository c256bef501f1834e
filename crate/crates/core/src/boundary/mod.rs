//! Distances to the boundary of topological hulls along orbits, the
//! three-way classification of such traces, and the comparison bounds that
//! relate hyperbolic and Euclidean quantities on simply connected hulls.
//!
//! The topological hull of a plane region is the region together with its
//! bounded complementary components. For an orbit `z_n ∈ U_n`,
//! `δ_n = dist(z_n, ∂Ũ_n)` and the trace of `δ_n` falls into one of three
//! cases: (a) bounded below, (b) a subsequence tends to 0 and another does
//! not, (c) tends to 0.

mod bounds;
mod region;
mod system;
mod trace;

pub use bounds::{
    harnack_check, loop_length_bound, shadowing_check, HarnackReport, LoopBoundReport, ShadowEntry,
    ShadowingReport,
};
pub use region::{topological_hull, HullDomain, PlaneRegion};
pub use system::{SyntheticSystem, SystemFamily};
pub use trace::{
    convergence_class, delta_sequence, BoundaryCase, BoundaryEntry, BoundaryTrace, ConvergenceCall,
    DEFAULT_THRESHOLD, MIN_TRACE_LEN, TAIL_FRACTION,
};

use num_complex::Complex64;
use thiserror::Error;

use crate::hypgeo::GeometryError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundaryError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("unsupported region: {0}")]
    UnsupportedRegion(String),
    #[error("orbit left U_{stage} at {point}")]
    OrbitEscapedDomain { stage: usize, point: Complex64 },
    #[error("bound violated at stage {stage}: {lhs} > {rhs}")]
    BoundViolated { stage: usize, lhs: f64, rhs: f64 },
    #[error("trace supports no stable classification: {0}")]
    Inconclusive(String),
    #[error("trace has {len} entries, need at least {need}")]
    TraceTooShort { len: usize, need: usize },
    #[error("stage {stage} overflows f64")]
    Overflow { stage: usize },
    #[error("invalid system: {0}")]
    InvalidSystem(String),
}
