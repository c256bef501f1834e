use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::region::HullDomain;
use super::system::SyntheticSystem;
use super::BoundaryError;
use crate::hypgeo::{density, distance, path_length, CanonicalDomain, GeometryError, PolylinePath};
use crate::modelmap::SampledCurve;

// Relative rounding allowance for inequalities that may hold with equality.
const REL_TOL: f64 = 1e-9;
const SEGMENT_PROBES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarnackReport {
    pub distance: f64,
    /// `ρ(z)/ρ(w)`.
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

/// Compares `ρ(z)/ρ(w)` with `e^{∓2d(z, w)}` on a simply connected domain.
pub fn harnack_check(
    domain: CanonicalDomain,
    z: Complex64,
    w: Complex64,
) -> Result<HarnackReport, BoundaryError> {
    if !domain.is_simply_connected() {
        return Err(GeometryError::NotSimplyConnected("Harnack comparison").into());
    }
    let d = distance(domain, z, w)?;
    let ratio = density(domain, z)? / density(domain, w)?;
    let (lower, upper) = ((-2.0 * d).exp(), (2.0 * d).exp());
    Ok(HarnackReport {
        distance: d,
        ratio,
        lower,
        upper,
        holds: lower * (1.0 - REL_TOL) <= ratio && ratio <= upper * (1.0 + REL_TOL),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowEntry {
    pub n: usize,
    /// `|f^n(z_0) − f^n(z_1)|`.
    pub separation: f64,
    /// `δ_n(f^n(z_0))`.
    pub delta: f64,
    /// `2C e^{2C} δ_n`.
    pub bound: f64,
    /// `|f^n(z_1) − w_n|`.
    pub witness_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowingReport {
    /// `C = d_{U_0}(z_0, z_1)`.
    pub c: f64,
    /// `2C e^{2C}`.
    pub factor: f64,
    pub entries: Vec<ShadowEntry>,
}

/// Checks `|f^n(z_0) − f^n(z_1)| ≤ 2C e^{2C} δ_n(f^n(z_0))` and
/// `|f^n(z_1) − w_n| ≤ |f^n(z_1) − f^n(z_0)| + δ_n` for `n ≤ stages`.
pub fn shadowing_check(
    system: &SyntheticSystem,
    z0: Complex64,
    z1: Complex64,
    stages: usize,
) -> Result<ShadowingReport, BoundaryError> {
    let c = distance(system.base_domain(), z0, z1)?;
    let factor = 2.0 * c * (2.0 * c).exp();
    let a = system.orbit(z0, stages)?;
    let b = system.orbit(z1, stages)?;
    let mut entries = Vec::with_capacity(stages + 1);
    for (n, (&p, &q)) in a.iter().zip(&b).enumerate() {
        let (delta, w) = system.domain(n)?.delta(p);
        let separation = (p - q).norm();
        let bound = factor * delta;
        if separation > bound * (1.0 + REL_TOL) {
            return Err(BoundaryError::BoundViolated {
                stage: n,
                lhs: separation,
                rhs: bound,
            });
        }
        let witness_gap = (q - w).norm();
        let triangle = separation + delta;
        if witness_gap > triangle * (1.0 + REL_TOL) {
            return Err(BoundaryError::BoundViolated {
                stage: n,
                lhs: witness_gap,
                rhs: triangle,
            });
        }
        entries.push(ShadowEntry {
            n,
            separation,
            delta,
            bound,
            witness_gap,
        });
    }
    Ok(ShadowingReport { c, factor, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopBoundReport {
    pub hyperbolic_length: f64,
    pub euclidean_length: f64,
    /// Largest distance to `∂Ũ` along the curve.
    pub max_hull_distance: f64,
    /// `ℓ_ℂ / (2 max δ)`.
    pub lower_bound: f64,
    pub holds: bool,
}

/// Compares the hyperbolic length of a loop with `ℓ_ℂ(γ)/(2 max_γ dist(·, ∂Ũ))`.
pub fn loop_length_bound(
    curve: &SampledCurve,
    hull: &HullDomain,
    domain: CanonicalDomain,
) -> Result<LoopBoundReport, BoundaryError> {
    let pts = curve.points();
    let path = PolylinePath::new(pts.to_vec(), domain)?;
    let hyperbolic_length = path_length(&path)?;
    let euclidean_length = curve.euclidean_length();
    let max_hull_distance = pts
        .windows(2)
        .flat_map(|w| {
            (0..SEGMENT_PROBES)
                .map(move |k| w[0] + (w[1] - w[0]) * (k as f64 / SEGMENT_PROBES as f64))
        })
        .chain(pts.last().copied())
        .map(|z| hull.delta(z).0)
        .fold(0.0, f64::max);
    let lower_bound = euclidean_length / (2.0 * max_hull_distance);
    Ok(LoopBoundReport {
        hyperbolic_length,
        euclidean_length,
        max_hull_distance,
        lower_bound,
        holds: hyperbolic_length >= lower_bound * (1.0 - REL_TOL),
    })
}
