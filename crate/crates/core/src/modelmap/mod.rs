//! The four-stage model map `τ, ψ, φ, σ`, its parameter sequences and
//! regions, and finite certifications of the containments `g(G_n) ⊂ G_{n+1}`.
//!
//! Stage `n` maps a neighbourhood of `m_n` to a neighbourhood of `m_{n+1}`:
//!
//! | `n mod 4` | map | `G_n` |
//! |---|---|---|
//! | 0 | `exp((z − m_n)/2) + m_{n+1}` | strip `|Re z − m_n| ≤ log r` |
//! | 1 | `λ(w + 1/w) + m_{n+1}`, `w = z − m_n` | annulus `1/r < |z − m_n| < r` |
//! | 2 | `2w/(w² + 1) + m_{n+1}` | `D + m_n` |
//! | 3 | `w (log r − ε)/log r + m_{n+1}` | strip `|Re z − m_n| ≤ log r` |
//!
//! `D` is the component of `φ^{-1}({|Re| < log r − ε})` inside the unit disk
//! that contains 0; see [`trace_phi_component`].

mod certify;
mod params;
mod stage;
mod trace;
mod winding;

pub use certify::{
    connectivity_audit, verify_containment, AuditFact, AuditReport, ContainmentReport, ModelLab,
    StageTopology, Topology, CLEARANCE_SLACK,
};
pub use params::{
    calibrate, generate_params, generate_params_with, invariant_checks, sampled_min_modulus,
    validate, Calibration, InvariantCheck, ModelParams, CALIBRATION_SAMPLES, CALIBRATION_SLACK,
    DEFAULT_CYCLES,
};
pub use stage::{
    stage_derivative, stage_map, stage_map_local, stage_poles, Region, RegionKind, RegionRole,
    POLE_RADIUS,
};
pub use trace::{
    phi, phi_derivative, phi_inverse, trace_phi_component, PhiComponent, DEFAULT_RESOLUTION,
};
pub use winding::{winding_number, SampledCurve};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("infeasible parameters: {0} fails")]
    InfeasibleParameters(String),
    #[error("calibration failed: {0}")]
    CalibrationFailed(String),
    #[error("stage {stage} evaluated within {radius:e} of a pole at {pole}")]
    PoleHit {
        stage: usize,
        pole: Complex64,
        radius: f64,
    },
    #[error("level-curve trace diverged: {0}")]
    TraceDiverged(String),
    #[error("stage {stage}: image of {witness} has clearance {clearance} (need {required})")]
    ContainmentViolated {
        stage: usize,
        witness: Complex64,
        clearance: f64,
        required: f64,
    },
    #[error("target lies on the image curve")]
    TargetOnCurve,
    #[error("image curve is not resolved after refinement")]
    ResolutionInsufficient,
    #[error("map is not finite at {0}")]
    NonFiniteImage(Complex64),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("audit of stage {stage} failed: {fact}")]
    AuditFailed { stage: usize, fact: String },
    #[error("stage {requested} is beyond the {available} generated stages")]
    StageOutOfRange { requested: usize, available: usize },
}
