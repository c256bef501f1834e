use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::{certify_curve, validate, ModelParams};
use super::stage::{stage_derivative, stage_map, stage_map_local, stage_poles, Region, RegionKind};
use super::trace::{trace_phi_component, PhiComponent, DEFAULT_RESOLUTION};
use super::winding::{winding_number, SampledCurve};
use super::ModelError;

/// Clearances equal to `ε` up to this rounding error are accepted.
pub const CLEARANCE_SLACK: f64 = 1e-10;

const CURVE_DEPTH: u32 = 24;
const STRIP_WINDOW: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub stage: usize,
    pub samples: usize,
    /// Smallest sampled clearance of an image point inside `G_{n+1}`.
    pub min_clearance: f64,
    pub witness: [f64; 2],
    /// Worst-case loss between boundary samples.
    pub padding: f64,
    /// Lower bound on the clearance of the whole image of `∂G_n`.
    pub certified_clearance: f64,
    pub required: f64,
    /// Bound on the distance between the model map and its approximant.
    pub approximation_budget: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub bounded: bool,
    pub connectivity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditFact {
    pub name: String,
    pub value: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTopology {
    pub stage: usize,
    pub topology: Topology,
    pub facts: Vec<AuditFact>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub k: usize,
    pub stages: Vec<StageTopology>,
}

/// Validated parameters together with the traced component `D`.
#[derive(Debug, Clone)]
pub struct ModelLab {
    params: ModelParams,
    component: PhiComponent,
}

#[derive(Clone, Copy)]
struct Sample {
    clearance: f64,
    at: Complex64,
}

/// Smaller clearance wins; ties go to the lexicographically smaller point so
/// that parallel reductions pick the same witness on every run.
fn min_sample(a: Sample, b: Sample) -> Sample {
    let key = |s: &Sample| (s.clearance, s.at.re, s.at.im);
    match key(&b).partial_cmp(&key(&a)) {
        Some(std::cmp::Ordering::Less) => b,
        None if a.clearance.is_nan() || a.at.re.is_nan() => b,
        _ => a,
    }
}

const NO_SAMPLE: Sample = Sample {
    clearance: f64::INFINITY,
    at: Complex64::new(f64::NAN, f64::NAN),
};

impl ModelLab {
    pub fn new(params: ModelParams) -> Result<Self, ModelError> {
        validate(&params)?;
        let component = trace_phi_component(params.r, params.eps, DEFAULT_RESOLUTION)?;
        Ok(Self { params, component })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn component(&self) -> &PhiComponent {
        &self.component
    }

    /// Signed Euclidean distance from `z` to the complement of `region`.
    pub fn clearance(&self, region: &Region, z: Complex64) -> f64 {
        match region.kind {
            RegionKind::HalfPlane { l } => l - z.re,
            RegionKind::VStrip { center, half_width } => half_width - (z.re - center).abs(),
            RegionKind::Disk { center, radius } => radius - (z - center).norm(),
            RegionKind::Annulus {
                center,
                inner,
                outer,
            } => {
                let d = (z - center).norm();
                (d - inner).min(outer - d)
            }
            RegionKind::PhiPreimage { center, .. } => self.component.signed_clearance(z - center),
            RegionKind::Line { x } => -(z.re - x).abs(),
        }
    }

    /// Minimum clearance over images of `m_n + w` for local offsets `w`.
    fn sweep(&self, n: usize, local: &[Complex64], target: &Region) -> Result<Sample, ModelError> {
        let (m, next) = (self.params.m[n], self.params.m[n + 1]);
        local
            .par_iter()
            .map(|&w| {
                let image = stage_map_local(&self.params, n, w)? + next;
                Ok(Sample {
                    clearance: self.clearance(target, image),
                    at: w + m,
                })
            })
            .try_reduce(|| NO_SAMPLE, |a, b| Ok(min_sample(a, b)))
    }

    /// Maps boundary and interior samples of `G_n` through stage `n` and
    /// checks that the images stay `ε` inside `G_{n+1}`.
    pub fn verify_containment(
        &self,
        n: usize,
        samples: usize,
    ) -> Result<ContainmentReport, ModelError> {
        let p = &self.params;
        p.check_stage(n)?;
        let samples = samples.max(16);
        let target = Region::g(p, n + 1);
        let m = Complex64::new(p.m[n], 0.0);
        let nb = samples / 2;
        let ni = samples - nb;
        let lr = p.log_r();

        // Boundary images of stages 0, 2 and 3 have constant clearance along
        // each boundary component, so only stage 1 needs padding.
        let (boundary, padding, certified) = match n % 4 {
            0 | 3 => {
                // exp((z − m)/2) has period 4πi; the affine stage only needs one window.
                let (lo, hi) = if n.is_multiple_of(4) {
                    (0.0, 2.0 * TAU)
                } else {
                    (-STRIP_WINDOW, STRIP_WINDOW)
                };
                let per_side = nb / 2;
                let pts: Vec<Complex64> = [-lr, lr]
                    .iter()
                    .flat_map(|&dx| {
                        (0..per_side).map(move |k| {
                            Complex64::new(dx, lo + (hi - lo) * k as f64 / per_side as f64)
                        })
                    })
                    .collect();
                let s = self.sweep(n, &pts, &target)?;
                (s, 0.0, s.clearance)
            }
            1 => {
                let mut worst = NO_SAMPLE;
                let mut certified = f64::INFINITY;
                let mut padding: f64 = 0.0;
                for radius in [p.r, 1.0 / p.r] {
                    let speed = p.lambda * (radius + 1.0 / radius);
                    let b = certify_curve(
                        |t| Complex64::from_polar(radius, t),
                        |w| {
                            stage_map_local(p, n, w).map_or(f64::NEG_INFINITY, |v| {
                                self.clearance(&target, v + p.m[n + 1])
                            })
                        },
                        (0.0, TAU),
                        speed,
                        nb / 2,
                        p.eps,
                        CURVE_DEPTH,
                    );
                    worst = min_sample(
                        worst,
                        Sample {
                            clearance: b.sampled_min,
                            at: b.witness + m,
                        },
                    );
                    certified = certified.min(b.certified);
                    padding = padding.max(b.sampled_min - b.certified);
                }
                (worst, padding, certified)
            }
            _ => {
                let arcs: Vec<Complex64> = self.component.boundary_points().collect();
                let stride = (arcs.len() / nb.max(1)).max(1);
                let pts: Vec<Complex64> = arcs.iter().step_by(stride).copied().collect();
                let s = self.sweep(n, &pts, &target)?;
                (s, 0.0, s.clearance)
            }
        };

        let interior = self.interior_samples(n, ni);
        let inner = self.sweep(n, &interior, &target)?;
        let worst = min_sample(boundary, inner);
        let required = p.eps;
        let passed = certified >= required - CLEARANCE_SLACK
            && inner.clearance >= required - CLEARANCE_SLACK;
        let report = ContainmentReport {
            stage: n,
            samples,
            min_clearance: worst.clearance,
            witness: [worst.at.re, worst.at.im],
            padding,
            certified_clearance: certified.min(inner.clearance),
            required,
            approximation_budget: p.approximation_budget(),
            passed,
        };
        if !passed {
            return Err(ModelError::ContainmentViolated {
                stage: n,
                witness: worst.at,
                clearance: report.certified_clearance,
                required,
            });
        }
        Ok(report)
    }

    /// Roughly `count` offsets `w` with `m_n + w` strictly inside `G_n`.
    fn interior_samples(&self, n: usize, count: usize) -> Vec<Complex64> {
        let p = &self.params;
        let side = ((count as f64).sqrt().ceil() as usize).max(2);
        let grid = |k: usize| (k as f64 + 0.5) / side as f64;
        match n % 4 {
            0 | 3 => {
                let (lo, hi) = if n.is_multiple_of(4) {
                    (0.0, 2.0 * TAU)
                } else {
                    (-STRIP_WINDOW, STRIP_WINDOW)
                };
                let lr = p.log_r();
                (0..side)
                    .flat_map(|i| {
                        (0..side).map(move |j| {
                            Complex64::new(-lr + 2.0 * lr * grid(i), lo + (hi - lo) * grid(j))
                        })
                    })
                    .collect()
            }
            1 => {
                let (a, b) = ((1.0 / p.r).ln(), p.r.ln());
                (0..side)
                    .flat_map(|i| {
                        (0..side).map(move |j| {
                            Complex64::from_polar((a + (b - a) * grid(i)).exp(), TAU * grid(j))
                        })
                    })
                    .collect()
            }
            _ => {
                // A square grid over the unit disk is about 4/π times denser than needed.
                let side = ((count as f64 * 4.0 / PI).sqrt().ceil() as usize).max(2);
                let g = |k: usize| -1.0 + 2.0 * (k as f64 + 0.5) / side as f64;
                (0..side)
                    .flat_map(|i| (0..side).map(move |j| Complex64::new(g(i), g(j))))
                    .filter(|&w| self.component.contains(w))
                    .collect()
            }
        }
    }

    /// Topology expected for each stage of cycle `k`, with the numeric facts supporting it.
    pub fn connectivity_audit(&self, k: usize) -> Result<AuditReport, ModelError> {
        let p = &self.params;
        if k >= p.cycles {
            return Err(ModelError::StageOutOfRange {
                requested: 4 * k,
                available: p.stages(),
            });
        }
        let stages = (4 * k..4 * k + 4)
            .map(|n| self.audit_stage(n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AuditReport { k, stages })
    }

    fn audit_stage(&self, n: usize) -> Result<StageTopology, ModelError> {
        let p = &self.params;
        let m = Complex64::new(p.m[n], 0.0);
        let mut facts = Vec::new();
        let mut fact =
            |name: String, value: f64, holds: bool| facts.push(AuditFact { name, value, holds });
        let topology = match n % 4 {
            0 => {
                // τ maps Re z = m ± log(2R') onto circles of radius (2R')^{±1/2} about m_{n+1}.
                let e = Region::e(p, n);
                let next = p.m[n + 1];
                let min = e
                    .sample_boundary(4096, TAU)
                    .par_iter()
                    .map(|&(z, _)| stage_map(p, n, z).map(|w| (w - next).norm()))
                    .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))?;
                let floor = (2.0 * p.rp).powf(-0.5);
                fact(
                    format!("min |tau - m_{}| on dE_{n} >= (2Rp)^(-1/2)", n + 1),
                    min,
                    min >= floor * (1.0 - 1e-12),
                );
                let gap = min - p.approximation_budget();
                fact(
                    format!("min |tau - m_{}| - budget > 1/(2Rp)", n + 1),
                    gap,
                    gap > 1.0 / (2.0 * p.rp),
                );
                Topology {
                    bounded: false,
                    connectivity: 1,
                }
            }
            1 => {
                let core = SampledCurve::circle(m, 1.0, 256);
                let w = winding_number(|z| z, &core, m)?;
                fact(
                    format!("core circle |z - m_{n}| = 1 winds about pole m_{n}"),
                    w as f64,
                    w == 1,
                );
                let pole_outside = stage_poles(p, n)?
                    .iter()
                    .all(|&q| !Region::g(p, n).contains(q));
                fact(format!("pole m_{n} lies outside G_{n}"), 0.0, pole_outside);
                Topology {
                    bounded: true,
                    connectivity: 2,
                }
            }
            2 => {
                let g = Region::g(p, n);
                let poles = stage_poles(p, n)?;
                let inside = poles.iter().filter(|&&q| g.contains(q)).count();
                fact(
                    format!("poles of stage {n} inside G_{n}"),
                    inside as f64,
                    inside == 0,
                );
                let boundary = self.component.closed_boundary().translated(m);
                for (q, label) in poles.iter().zip(["+i", "-i"]) {
                    let w = winding_number(|z| z, &boundary, *q)?;
                    fact(
                        format!("dG_{n} winds about m_{n} {label}"),
                        w as f64,
                        w == 0,
                    );
                }
                let w = winding_number(|z| z, &boundary, m)?;
                fact(format!("dG_{n} winds once about m_{n}"), w as f64, w == 1);
                Topology {
                    bounded: true,
                    connectivity: 1,
                }
            }
            _ => {
                let (lr, eps) = (p.log_r(), p.eps);
                let back = p.m[n] - p.x[n - 1];
                fact(
                    format!("m_{n} - x_{} < log r + eps", n - 1),
                    back,
                    back < lr + eps,
                );
                let fwd = p.x[n] - p.m[n];
                fact(format!("x_{n} - m_{n} < log r + eps"), fwd, fwd < lr + eps);
                Topology {
                    bounded: false,
                    connectivity: 1,
                }
            }
        };
        if let Some(bad) = facts.iter().find(|f| !f.holds) {
            return Err(ModelError::AuditFailed {
                stage: n,
                fact: bad.name.clone(),
            });
        }
        Ok(StageTopology {
            stage: n,
            topology,
            facts,
        })
    }

    /// Largest `|g'|` seen at the boundary samples of `G_n`, for diagnostics.
    pub fn boundary_derivative_bound(&self, n: usize, samples: usize) -> Result<f64, ModelError> {
        let p = &self.params;
        let g = Region::g(p, n);
        let pts: Vec<Complex64> = match g.kind {
            RegionKind::PhiPreimage { center, .. } => self
                .component
                .boundary_points()
                .map(|w| w + center)
                .collect(),
            _ => g
                .sample_boundary(samples, STRIP_WINDOW)
                .into_iter()
                .map(|(z, _)| z)
                .collect(),
        };
        pts.par_iter()
            .map(|&z| stage_derivative(p, n, z).map(|d| d.norm()))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }
}

pub fn verify_containment(
    params: &ModelParams,
    n: usize,
    samples: usize,
) -> Result<ContainmentReport, ModelError> {
    ModelLab::new(params.clone())?.verify_containment(n, samples)
}

pub fn connectivity_audit(params: &ModelParams, k: usize) -> Result<AuditReport, ModelError> {
    ModelLab::new(params.clone())?.connectivity_audit(k)
}
