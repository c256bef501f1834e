use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::region::{topological_hull, HullDomain, PlaneRegion};
use super::BoundaryError;
use crate::hypgeo::CanonicalDomain;

/// Families of domain sequences `U_n` with holomorphic maps `U_n → U_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SystemFamily {
    /// `U_n = 𝔻`; disk automorphisms move the marked point along `a_n = 1 − 2^{-n}`.
    DiskApproach,
    /// `U_n = 𝔻`; the marked point visits `1 − 2^{-n}` at even `n` and `1/2` at odd `n`.
    DiskAlternating,
    /// `U_n = {|Im z| < π/2}`, `f(z) = z/2 + 1`.
    StripContraction,
    /// `U_n = A(R^{D_n})`, `f(z) = z^d`, `D_n = dⁿ`.
    Tower { r: f64, degree: u32 },
}

/// A finite stretch `U_0, …, U_N` of a [`SystemFamily`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSystem {
    pub family: SystemFamily,
}

/// `z ↦ (z + b)/(1 + b z)`, a disk automorphism sending 0 to `b`.
fn disk_shift(b: f64, z: Complex64) -> Complex64 {
    (z + b) / (1.0 + b * z)
}

impl SyntheticSystem {
    pub fn new(family: SystemFamily) -> Result<Self, BoundaryError> {
        if let SystemFamily::Tower { r, degree } = family {
            if !(r > 1.0 && r.is_finite()) || degree < 2 {
                return Err(BoundaryError::InvalidSystem(format!(
                    "tower needs R > 1 and d >= 2, got R = {r}, d = {degree}"
                )));
            }
        }
        Ok(Self { family })
    }

    /// `U_0` as a canonical domain, where hyperbolic distances are available.
    pub fn base_domain(&self) -> CanonicalDomain {
        match self.family {
            SystemFamily::DiskApproach | SystemFamily::DiskAlternating => CanonicalDomain::UnitDisk,
            SystemFamily::StripContraction => CanonicalDomain::HorizontalStrip,
            SystemFamily::Tower { r, .. } => CanonicalDomain::annulus(r).expect("validated in new"),
        }
    }

    /// The point whose orbit defines the family.
    pub fn marked_point(&self) -> Complex64 {
        match self.family {
            SystemFamily::Tower { .. } => Complex64::new(1.0, 0.0),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    fn anchor(&self, n: usize) -> f64 {
        let approach = 1.0 - 0.5f64.powi(n as i32);
        match self.family {
            SystemFamily::DiskAlternating if n % 2 == 1 => 0.5,
            _ => approach,
        }
    }

    /// `U_n`.
    pub fn region(&self, n: usize) -> Result<PlaneRegion, BoundaryError> {
        let origin = Complex64::new(0.0, 0.0);
        Ok(match self.family {
            SystemFamily::DiskApproach | SystemFamily::DiskAlternating => PlaneRegion::Disk {
                center: origin,
                radius: 1.0,
            },
            SystemFamily::StripContraction => PlaneRegion::HorizontalStrip {
                center: 0.0,
                half_width: FRAC_PI_2,
            },
            SystemFamily::Tower { r, degree } => {
                let outer = r.powf((degree as f64).powi(n as i32));
                if !outer.is_finite() {
                    return Err(BoundaryError::Overflow { stage: n });
                }
                PlaneRegion::Annulus {
                    center: origin,
                    inner: 1.0 / outer,
                    outer,
                }
            }
        })
    }

    pub fn domain(&self, n: usize) -> Result<HullDomain, BoundaryError> {
        topological_hull(&self.region(n)?)
    }

    /// The map `U_n → U_{n+1}`.
    pub fn step(&self, n: usize, z: Complex64) -> Complex64 {
        match self.family {
            SystemFamily::DiskApproach | SystemFamily::DiskAlternating => {
                disk_shift(self.anchor(n + 1), disk_shift(-self.anchor(n), z))
            }
            SystemFamily::StripContraction => z / 2.0 + 1.0,
            SystemFamily::Tower { degree, .. } => z.powu(degree),
        }
    }

    /// `z_0, …, z_N`, checking `z_n ∈ U_n`.
    pub fn orbit(&self, z0: Complex64, stages: usize) -> Result<Vec<Complex64>, BoundaryError> {
        let mut out = Vec::with_capacity(stages + 1);
        let mut z = z0;
        for n in 0..=stages {
            if !self.region(n)?.contains(z) {
                return Err(BoundaryError::OrbitEscapedDomain { stage: n, point: z });
            }
            out.push(z);
            if n < stages {
                z = self.step(n, z);
            }
        }
        Ok(out)
    }

    /// A random point of `U_0`, kept a little away from its boundary.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        match self.family {
            SystemFamily::DiskApproach | SystemFamily::DiskAlternating => Complex64::from_polar(
                0.95 * rng.gen::<f64>().sqrt(),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ),
            SystemFamily::StripContraction => {
                Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-1.5..1.5))
            }
            SystemFamily::Tower { r, .. } => {
                let u = 0.95 * r.ln() * rng.gen_range(-1.0..1.0);
                Complex64::from_polar(u.exp(), rng.gen_range(0.0..std::f64::consts::TAU))
            }
        }
    }
}
