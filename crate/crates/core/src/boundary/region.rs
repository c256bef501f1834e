use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BoundaryError;
use crate::hypgeo::CanonicalDomain;
use crate::modelmap::{PhiComponent, Region, RegionKind};

/// Plane regions with exact membership, boundary distance and nearest boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlaneRegion {
    /// `|z − center| < radius`.
    Disk { center: Complex64, radius: f64 },
    /// `inner < |z − center| < outer`.
    Annulus {
        center: Complex64,
        inner: f64,
        outer: f64,
    },
    /// `|Im z − center| < half_width`.
    HorizontalStrip { center: f64, half_width: f64 },
    /// `|Re z − center| < half_width`.
    VerticalStrip { center: f64, half_width: f64 },
    /// `Re z < l`.
    LeftHalfPlane { l: f64 },
    /// `Re z > x0`.
    RightHalfPlane { x0: f64 },
    /// Interior of the simple polygon `outer` minus the closed polygons `holes`.
    Polygon {
        outer: Vec<Complex64>,
        holes: Vec<Vec<Complex64>>,
    },
}

fn project_to_segment(z: Complex64, a: Complex64, b: Complex64) -> Complex64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return a;
    }
    let t = ((z - a) * ab.conj()).re / len2;
    a + ab * t.clamp(0.0, 1.0)
}

fn edges(ring: &[Complex64]) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
    (0..ring.len()).map(move |k| (ring[k], ring[(k + 1) % ring.len()]))
}

fn nearest_on_ring(z: Complex64, ring: &[Complex64]) -> Complex64 {
    edges(ring)
        .map(|(a, b)| project_to_segment(z, a, b))
        .min_by(|p, q| (p - z).norm().total_cmp(&(q - z).norm()))
        .unwrap_or(z)
}

/// Even-odd rule.
fn inside_ring(z: Complex64, ring: &[Complex64]) -> bool {
    let mut inside = false;
    for (a, b) in edges(ring) {
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if z.re < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn radial_point(center: Complex64, radius: f64, z: Complex64) -> Complex64 {
    let d = z - center;
    let n = d.norm();
    if n == 0.0 {
        center + radius
    } else {
        center + d * (radius / n)
    }
}

/// Drops a repeated closing vertex.
fn open_ring(mut ring: Vec<Complex64>) -> Vec<Complex64> {
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    ring
}

impl PlaneRegion {
    /// Polygon with holes; closing vertices may be repeated.
    pub fn polygon(
        outer: Vec<Complex64>,
        holes: Vec<Vec<Complex64>>,
    ) -> Result<Self, BoundaryError> {
        let outer = open_ring(outer);
        let holes: Vec<_> = holes.into_iter().map(open_ring).collect();
        if outer.len() < 3 || holes.iter().any(|h| h.len() < 3) {
            return Err(BoundaryError::UnsupportedRegion(
                "polygon rings need at least three vertices".into(),
            ));
        }
        Ok(PlaneRegion::Polygon { outer, holes })
    }

    /// `D + center` as the polygon of its traced boundary.
    pub fn from_phi_component(component: &PhiComponent, center: f64) -> Self {
        let ring = component
            .closed_boundary()
            .points()
            .iter()
            .map(|w| w + center)
            .collect();
        PlaneRegion::Polygon {
            outer: open_ring(ring),
            holes: Vec::new(),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            PlaneRegion::Disk { center, radius } => (z - center).norm() < *radius,
            PlaneRegion::Annulus {
                center,
                inner,
                outer,
            } => {
                let d = (z - center).norm();
                *inner < d && d < *outer
            }
            PlaneRegion::HorizontalStrip { center, half_width } => {
                (z.im - center).abs() < *half_width
            }
            PlaneRegion::VerticalStrip { center, half_width } => {
                (z.re - center).abs() < *half_width
            }
            PlaneRegion::LeftHalfPlane { l } => z.re < *l,
            PlaneRegion::RightHalfPlane { x0 } => z.re > *x0,
            PlaneRegion::Polygon { outer, holes } => {
                inside_ring(z, outer) && !holes.iter().any(|h| inside_ring(z, h))
            }
        }
    }

    /// Closest point of the boundary to `z`.
    pub fn nearest_boundary_point(&self, z: Complex64) -> Complex64 {
        match self {
            PlaneRegion::Disk { center, radius } => radial_point(*center, *radius, z),
            PlaneRegion::Annulus {
                center,
                inner,
                outer,
            } => {
                let d = (z - center).norm();
                let radius = if d - inner < outer - d {
                    *inner
                } else {
                    *outer
                };
                radial_point(*center, radius, z)
            }
            PlaneRegion::HorizontalStrip { center, half_width } => {
                let side = if z.im >= *center { 1.0 } else { -1.0 };
                Complex64::new(z.re, center + side * half_width)
            }
            PlaneRegion::VerticalStrip { center, half_width } => {
                let side = if z.re >= *center { 1.0 } else { -1.0 };
                Complex64::new(center + side * half_width, z.im)
            }
            PlaneRegion::LeftHalfPlane { l } => Complex64::new(*l, z.im),
            PlaneRegion::RightHalfPlane { x0 } => Complex64::new(*x0, z.im),
            PlaneRegion::Polygon { outer, holes } => std::iter::once(outer)
                .chain(holes.iter())
                .map(|ring| nearest_on_ring(z, ring))
                .min_by(|p, q| (p - z).norm().total_cmp(&(q - z).norm()))
                .unwrap_or(z),
        }
    }

    /// Euclidean distance from `z` to the boundary.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match self {
            PlaneRegion::Disk { center, radius } => ((z - center).norm() - radius).abs(),
            PlaneRegion::Annulus {
                center,
                inner,
                outer,
            } => {
                let d = (z - center).norm();
                (d - inner).abs().min((outer - d).abs())
            }
            PlaneRegion::HorizontalStrip { center, half_width } => {
                ((z.im - center).abs() - half_width).abs()
            }
            PlaneRegion::VerticalStrip { center, half_width } => {
                ((z.re - center).abs() - half_width).abs()
            }
            PlaneRegion::LeftHalfPlane { l } => (z.re - l).abs(),
            PlaneRegion::RightHalfPlane { x0 } => (z.re - x0).abs(),
            PlaneRegion::Polygon { .. } => (z - self.nearest_boundary_point(z)).norm(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(
            self,
            PlaneRegion::Disk { .. } | PlaneRegion::Annulus { .. } | PlaneRegion::Polygon { .. }
        )
    }
}

impl From<CanonicalDomain> for PlaneRegion {
    fn from(d: CanonicalDomain) -> Self {
        let origin = Complex64::new(0.0, 0.0);
        match d {
            CanonicalDomain::UnitDisk => PlaneRegion::Disk {
                center: origin,
                radius: 1.0,
            },
            CanonicalDomain::RightHalfPlane => PlaneRegion::RightHalfPlane { x0: 0.0 },
            CanonicalDomain::HorizontalStrip => PlaneRegion::HorizontalStrip {
                center: 0.0,
                half_width: FRAC_PI_2,
            },
            CanonicalDomain::Annulus(a) => PlaneRegion::Annulus {
                center: origin,
                inner: 1.0 / a.outer_radius(),
                outer: a.outer_radius(),
            },
        }
    }
}

impl TryFrom<&Region> for PlaneRegion {
    type Error = BoundaryError;

    /// `D + m` needs its traced boundary; use [`PlaneRegion::from_phi_component`].
    fn try_from(r: &Region) -> Result<Self, BoundaryError> {
        let c = |x: f64| Complex64::new(x, 0.0);
        Ok(match r.kind {
            RegionKind::HalfPlane { l } => PlaneRegion::LeftHalfPlane { l },
            RegionKind::VStrip { center, half_width } => {
                PlaneRegion::VerticalStrip { center, half_width }
            }
            RegionKind::Disk { center, radius } => PlaneRegion::Disk {
                center: c(center),
                radius,
            },
            RegionKind::Annulus {
                center,
                inner,
                outer,
            } => PlaneRegion::Annulus {
                center: c(center),
                inner,
                outer,
            },
            RegionKind::PhiPreimage { .. } => {
                return Err(BoundaryError::UnsupportedRegion(
                    "D + m needs its traced boundary".into(),
                ))
            }
            RegionKind::Line { .. } => {
                return Err(BoundaryError::UnsupportedRegion(
                    "a line has empty interior".into(),
                ))
            }
        })
    }
}

/// A region and its topological hull.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullDomain {
    pub base: PlaneRegion,
    pub hull: PlaneRegion,
}

impl HullDomain {
    /// `(dist(z, ∂Ũ), nearest point of ∂Ũ)`.
    pub fn delta(&self, z: Complex64) -> (f64, Complex64) {
        let w = self.hull.nearest_boundary_point(z);
        (self.hull.boundary_distance(z), w)
    }

    pub fn base_distance(&self, z: Complex64) -> f64 {
        self.base.boundary_distance(z)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.base.contains(z)
    }
}

/// Fills the bounded complementary components of `region`.
pub fn topological_hull(region: &PlaneRegion) -> Result<HullDomain, BoundaryError> {
    let hull = match region {
        PlaneRegion::Annulus {
            center,
            inner,
            outer,
        } => {
            if !(0.0 <= *inner && inner < outer) {
                return Err(BoundaryError::UnsupportedRegion(format!(
                    "annulus radii {inner}, {outer}"
                )));
            }
            PlaneRegion::Disk {
                center: *center,
                radius: *outer,
            }
        }
        PlaneRegion::Polygon { outer, .. } => PlaneRegion::Polygon {
            outer: outer.clone(),
            holes: Vec::new(),
        },
        other => other.clone(),
    };
    Ok(HullDomain {
        base: region.clone(),
        hull,
    })
}
