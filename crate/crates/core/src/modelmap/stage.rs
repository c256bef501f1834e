use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use super::trace::{phi, phi_derivative, phi_inverse};
use super::ModelError;

/// Evaluations closer than this to a pole are rejected.
pub const POLE_RADIUS: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn local_poles(n: usize) -> &'static [Complex64] {
    const PSI: [Complex64; 1] = [Complex64::new(0.0, 0.0)];
    const PHI: [Complex64; 2] = [I, Complex64::new(0.0, -1.0)];
    match n % 4 {
        1 => &PSI,
        2 => &PHI,
        _ => &[],
    }
}

/// Poles of the stage-`n` map: `m_n` for `ψ`, `m_n ± i` for `φ`, none otherwise.
pub fn stage_poles(p: &ModelParams, n: usize) -> Result<Vec<Complex64>, ModelError> {
    p.check_stage(n)?;
    Ok(local_poles(n).iter().map(|q| q + p.m[n]).collect())
}

fn check_local(p: &ModelParams, n: usize, w: Complex64) -> Result<(), ModelError> {
    p.check_stage(n)?;
    match local_poles(n)
        .iter()
        .find(|&&q| (w - q).norm() < POLE_RADIUS)
    {
        Some(q) => Err(ModelError::PoleHit {
            stage: n,
            pole: q + p.m[n],
            radius: POLE_RADIUS,
        }),
        None => Ok(()),
    }
}

/// The stage-`n` model map.
pub fn stage_map(p: &ModelParams, n: usize, z: Complex64) -> Result<Complex64, ModelError> {
    let w = z - p.m[n];
    check_local(p, n, w)?;
    Ok(local_map(p, n, w) + p.m[n + 1])
}

/// `stage_map(m_n + w) − m_{n+1}`, evaluated without the cancellation in `z − m_n`.
pub fn stage_map_local(p: &ModelParams, n: usize, w: Complex64) -> Result<Complex64, ModelError> {
    check_local(p, n, w)?;
    Ok(local_map(p, n, w))
}

fn local_map(p: &ModelParams, n: usize, w: Complex64) -> Complex64 {
    match n % 4 {
        0 => (w / 2.0).exp(),
        1 => p.lambda * (w + 1.0 / w),
        2 => phi(w),
        _ => w * ((p.log_r() - p.eps) / p.log_r()),
    }
}

pub fn stage_derivative(p: &ModelParams, n: usize, z: Complex64) -> Result<Complex64, ModelError> {
    let w = z - p.m[n];
    check_local(p, n, w)?;
    Ok(match n % 4 {
        0 => (w / 2.0).exp() / 2.0,
        1 => p.lambda * (1.0 - 1.0 / (w * w)),
        2 => phi_derivative(w),
        _ => Complex64::new((p.log_r() - p.eps) / p.log_r(), 0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionKind {
    /// `Re z ≤ l`.
    HalfPlane { l: f64 },
    /// `|Re z − center| ≤ half_width`.
    VStrip { center: f64, half_width: f64 },
    /// `|z − center| ≤ radius`.
    Disk { center: f64, radius: f64 },
    /// `inner < |z − center| < outer`.
    Annulus { center: f64, inner: f64, outer: f64 },
    /// `D + center`, where `D = {|w| < 1, |Re φ(w)| < half_width}`.
    PhiPreimage { center: f64, half_width: f64 },
    /// `Re z = x`.
    Line { x: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionRole {
    H,
    E,
    G,
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub kind: RegionKind,
    pub role: RegionRole,
    pub stage: usize,
}

impl Region {
    /// `H_n = {Re z ≤ l_n}`.
    pub fn h(p: &ModelParams, n: usize) -> Self {
        Self {
            kind: RegionKind::HalfPlane { l: p.l[n] },
            role: RegionRole::H,
            stage: n,
        }
    }

    /// The bounded-in-`Re` part `E_n` of `F_n`.
    pub fn e(p: &ModelParams, n: usize) -> Self {
        let (center, w) = (p.m[n], p.e_extent(n));
        let kind = match n % 4 {
            0 | 3 => RegionKind::VStrip {
                center,
                half_width: w,
            },
            _ => RegionKind::Disk { center, radius: w },
        };
        Self {
            kind,
            role: RegionRole::E,
            stage: n,
        }
    }

    /// The invariant pieces `G_n ⊂ E_n`.
    pub fn g(p: &ModelParams, n: usize) -> Self {
        let center = p.m[n];
        let kind = match n % 4 {
            0 => RegionKind::VStrip {
                center,
                half_width: p.log_r(),
            },
            1 => RegionKind::Annulus {
                center,
                inner: 1.0 / p.r,
                outer: p.r,
            },
            2 => RegionKind::PhiPreimage {
                center,
                half_width: p.log_r() - p.eps,
            },
            _ => {
                return Self {
                    role: RegionRole::G,
                    ..Self::e(p, n)
                }
            }
        };
        Self {
            kind,
            role: RegionRole::G,
            stage: n,
        }
    }

    /// `L_n = {Re z = x_n}`.
    pub fn l(p: &ModelParams, n: usize) -> Self {
        Self {
            kind: RegionKind::Line { x: p.x[n] },
            role: RegionRole::L,
            stage: n,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self.kind {
            RegionKind::HalfPlane { l } => z.re <= l,
            RegionKind::VStrip { center, half_width } => (z.re - center).abs() <= half_width,
            RegionKind::Disk { center, radius } => (z - center).norm() <= radius,
            RegionKind::Annulus {
                center,
                inner,
                outer,
            } => {
                let d = (z - center).norm();
                inner < d && d < outer
            }
            RegionKind::PhiPreimage { center, half_width } => {
                let w = z - center;
                w.norm() < 1.0 && phi(w).re.abs() < half_width
            }
            RegionKind::Line { x } => z.re == x,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(
            self.kind,
            RegionKind::Disk { .. } | RegionKind::Annulus { .. } | RegionKind::PhiPreimage { .. }
        )
    }

    /// About `n` boundary points with outward unit normals.
    ///
    /// Unbounded boundaries are sampled for `|Im z| ≤ window`.
    pub fn sample_boundary(&self, n: usize, window: f64) -> Vec<(Complex64, Complex64)> {
        let n = n.max(4);
        let along =
            |k: usize, count: usize| -window + 2.0 * window * k as f64 / (count - 1).max(1) as f64;
        let circle = |center: f64, radius: f64, count: usize, sign: f64| {
            (0..count)
                .map(move |k| {
                    let u =
                        Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / count as f64);
                    (center + radius * u, sign * u)
                })
                .collect::<Vec<_>>()
        };
        match self.kind {
            RegionKind::HalfPlane { l } => (0..n)
                .map(|k| (Complex64::new(l, along(k, n)), Complex64::new(1.0, 0.0)))
                .collect(),
            RegionKind::VStrip { center, half_width } => {
                let half = n / 2;
                let mut out = Vec::with_capacity(2 * half);
                for side in [-1.0, 1.0] {
                    out.extend((0..half).map(|k| {
                        (
                            Complex64::new(center + side * half_width, along(k, half)),
                            Complex64::new(side, 0.0),
                        )
                    }));
                }
                out
            }
            RegionKind::Disk { center, radius } => circle(center, radius, n, 1.0),
            RegionKind::Annulus {
                center,
                inner,
                outer,
            } => {
                let mut out = circle(center, outer, n / 2, 1.0);
                out.extend(circle(center, inner, n / 2, -1.0));
                out
            }
            RegionKind::PhiPreimage { center, half_width } => {
                // w = φ^{-1}(±a + i tan s) covers each arc once as s runs over (−π/2, π/2).
                let half = n / 2;
                let mut out = Vec::with_capacity(2 * half);
                for side in [-1.0, 1.0] {
                    for k in 0..half {
                        let s = -FRAC_PI_2 + std::f64::consts::PI * (k as f64 + 0.5) / half as f64;
                        let w = phi_inverse(Complex64::new(side * half_width, s.tan()));
                        let grad = phi_derivative(w).conj() * side;
                        out.push((center + w, grad / grad.norm()));
                    }
                }
                out
            }
            RegionKind::Line { x } => (0..n)
                .map(|k| (Complex64::new(x, along(k, n)), Complex64::new(1.0, 0.0)))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::params::generate_params;
    use super::*;
    use std::f64::consts::PI;

    fn params() -> ModelParams {
        generate_params(2.5, 1e-3, 1.0).unwrap()
    }

    #[test]
    fn stage_examples() {
        let p = params();
        let m0 = Complex64::new(p.m[0], 0.0);
        let v = stage_map(&p, 0, m0).unwrap();
        assert!((v - (p.m[1] + 1.0)).norm() < 1e-12);
        let v = stage_map(&p, 0, m0 + PI * I).unwrap();
        assert!((v - (p.m[1] + I)).norm() < 1e-12);
        let z = Complex64::new(p.m[3] + p.log_r(), 0.0);
        let v = stage_map(&p, 3, z).unwrap();
        assert!((v - (p.m[4] + p.log_r() - p.eps)).norm() < 1e-12);
        // ψ vanishes (relative to m_2) at m_1 ± i
        let v = stage_map(&p, 1, Complex64::new(p.m[1], 0.0) + I).unwrap();
        assert!((v - p.m[2]).norm() < 1e-12);
    }

    #[test]
    fn poles_are_registered() {
        let p = params();
        for n in 0..p.stages() {
            for pole in stage_poles(&p, n).unwrap() {
                assert!(matches!(
                    stage_map(&p, n, pole),
                    Err(ModelError::PoleHit { .. })
                ));
                let near = stage_map(&p, n, pole + Complex64::new(1e-11, 0.0)).unwrap();
                assert!(near.norm() > 1e10, "stage {n}: {near}");
            }
        }
        assert_eq!(stage_poles(&p, 0).unwrap().len(), 0);
        assert_eq!(
            stage_poles(&p, 5).unwrap(),
            vec![Complex64::new(p.m[5], 0.0)]
        );
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let p = params();
        for n in 0..4 {
            let z = Complex64::new(p.m[n] + 0.3, 0.2);
            let h = 1e-6;
            let fd =
                (stage_map(&p, n, z + h).unwrap() - stage_map(&p, n, z - h).unwrap()) / (2.0 * h);
            assert!((fd - stage_derivative(&p, n, z).unwrap()).norm() < 1e-6);
        }
    }

    #[test]
    fn membership_flips_across_sampled_boundary() {
        let p = params();
        let eta = 1e-7;
        for n in 0..4 {
            for region in [Region::h(&p, n), Region::e(&p, n), Region::g(&p, n)] {
                for (z, normal) in region.sample_boundary(64, 5.0) {
                    assert!(region.contains(z - normal * eta), "{region:?} at {z}");
                    assert!(!region.contains(z + normal * eta), "{region:?} at {z}");
                }
            }
        }
    }

    #[test]
    fn g_inside_e() {
        let p = params();
        for n in 0..p.stages() {
            let (g, e) = (Region::g(&p, n), Region::e(&p, n));
            for (z, normal) in g.sample_boundary(256, 5.0) {
                assert!(e.contains(z - normal * 1e-9), "stage {n}");
            }
        }
    }
}
