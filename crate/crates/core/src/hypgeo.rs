//! Hyperbolic geometry on the canonical domains: the unit disk, the right
//! half-plane, the strip `{|Im ζ| < π/2}` and the symmetric annulus
//! `A(R) = {1/R < |z| < R}`.
//!
//! All densities are normalised to curvature −1, so the disk density is
//! `2/(1 − |z|²)` and the core circle of `A(R)` has length `π²/log R`.
//! Distances use closed forms; the annulus is handled through its universal
//! cover by the strip, minimising over deck translates. [`path_length`] and
//! [`curve_length`] integrate the density numerically and are kept as an
//! independent check on the closed forms.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature;

/// A point of the plane. Components must be finite.
pub type ComplexValue = Complex64;

/// Points closer than this to the boundary of a domain are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

/// Default absolute tolerance for density quadrature.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Default half-width of the deck-translate search window.
pub const DECK_WINDOW: i64 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point {re} + {im}i is not strictly inside the domain")]
    PointOutsideDomain { re: f64, im: f64 },
    #[error("annulus parameter must exceed 1, got {0}")]
    InvalidAnnulus(f64),
    #[error("winding number must be non-zero")]
    InvalidWinding,
    #[error("a path needs at least two vertices")]
    DegeneratePath,
    #[error("{0} requires a simply connected domain")]
    NotSimplyConnected(&'static str),
}

fn outside(z: ComplexValue) -> GeometryError {
    GeometryError::PointOutsideDomain { re: z.re, im: z.im }
}

/// A nonzero complex number as `(log|z|, arg z)` with an explicit branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPolarPoint {
    pub u: f64,
    pub theta: f64,
}

impl LogPolarPoint {
    pub fn new(u: f64, theta: f64) -> Self {
        Self { u, theta }
    }

    /// Principal branch, `theta ∈ (−π, π]`.
    pub fn from_complex(z: ComplexValue) -> Self {
        Self {
            u: z.norm().ln(),
            theta: z.arg(),
        }
    }

    pub fn from_polar(modulus: f64, theta: f64) -> Self {
        Self {
            u: modulus.ln(),
            theta,
        }
    }

    pub fn modulus(&self) -> f64 {
        self.u.exp()
    }

    pub fn to_complex(&self) -> ComplexValue {
        Complex64::from_polar(self.u.exp(), self.theta)
    }
}

/// `A(R) = {1/R < |z| < R}` with `R > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricAnnulus {
    r: f64,
}

impl SymmetricAnnulus {
    pub fn new(r: f64) -> Result<Self, GeometryError> {
        if r.is_finite() && r > 1.0 {
            Ok(Self { r })
        } else {
            Err(GeometryError::InvalidAnnulus(r))
        }
    }

    pub fn outer_radius(&self) -> f64 {
        self.r
    }

    pub fn log_radius(&self) -> f64 {
        self.r.ln()
    }

    /// `Mod A(R) = 2 log R`.
    pub fn modulus(&self) -> f64 {
        2.0 * self.r.ln()
    }

    /// Scale factor of the covering `z ↦ (π/(2 log R))(arg z + i log|z|)`.
    pub fn lift_scale(&self) -> f64 {
        FRAC_PI_2 / self.log_radius()
    }

    /// Real period of the deck group on the strip, `π²/log R`.
    pub fn deck_spacing(&self) -> f64 {
        PI * PI / self.log_radius()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CanonicalDomain {
    UnitDisk,
    RightHalfPlane,
    /// `{|Im ζ| < π/2}`.
    HorizontalStrip,
    Annulus(SymmetricAnnulus),
}

impl CanonicalDomain {
    pub fn annulus(r: f64) -> Result<Self, GeometryError> {
        SymmetricAnnulus::new(r).map(CanonicalDomain::Annulus)
    }

    pub fn is_simply_connected(&self) -> bool {
        !matches!(self, CanonicalDomain::Annulus(_))
    }

    /// Euclidean distance from `z` to the boundary; negative outside.
    pub fn boundary_distance(&self, z: ComplexValue) -> f64 {
        match self {
            CanonicalDomain::UnitDisk => 1.0 - z.norm(),
            CanonicalDomain::RightHalfPlane => z.re,
            CanonicalDomain::HorizontalStrip => FRAC_PI_2 - z.im.abs(),
            CanonicalDomain::Annulus(a) => {
                let m = z.norm();
                (m - 1.0 / a.r).min(a.r - m)
            }
        }
    }

    pub fn contains(&self, z: ComplexValue) -> bool {
        z.re.is_finite() && z.im.is_finite() && self.boundary_distance(z) > BOUNDARY_MARGIN
    }

    fn check(&self, z: ComplexValue) -> Result<(), GeometryError> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(outside(z))
        }
    }
}

/// An ordered polyline strictly inside a canonical domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PolylinePath {
    vertices: Vec<ComplexValue>,
    ambient: CanonicalDomain,
}

impl PolylinePath {
    pub fn new(
        vertices: Vec<ComplexValue>,
        ambient: CanonicalDomain,
    ) -> Result<Self, GeometryError> {
        if vertices.len() < 2 {
            return Err(GeometryError::DegeneratePath);
        }
        for &v in &vertices {
            ambient.check(v)?;
        }
        Ok(Self { vertices, ambient })
    }

    pub fn vertices(&self) -> &[ComplexValue] {
        &self.vertices
    }

    pub fn ambient(&self) -> CanonicalDomain {
        self.ambient
    }

    pub fn euclidean_length(&self) -> f64 {
        self.vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

/// Curvature −1 hyperbolic density at `z`.
pub fn density(domain: CanonicalDomain, z: ComplexValue) -> Result<f64, GeometryError> {
    domain.check(z)?;
    Ok(match domain {
        CanonicalDomain::UnitDisk => 2.0 / (1.0 - z.norm_sqr()),
        CanonicalDomain::RightHalfPlane => 1.0 / z.re,
        CanonicalDomain::HorizontalStrip => 1.0 / z.im.cos(),
        CanonicalDomain::Annulus(a) => {
            let k = a.lift_scale();
            let m = z.norm();
            k / (m * (k * m.ln()).cos())
        }
    })
}

/// Distance in the strip between `x1 + i y1` and `x2 + i y2` where `dx = x1 − x2`.
///
/// Pulled back from the half-plane through `exp`; strictly increasing in `|dx|`.
pub fn strip_distance(dx: f64, y1: f64, y2: f64) -> f64 {
    let s = (0.5 * dx).sinh();
    let t = (0.5 * (y1 - y2)).sin();
    let q = (s * s + t * t) / (y1.cos() * y2.cos());
    2.0 * q.sqrt().asinh()
}

/// Minimum of [`strip_distance`] over deck translates `dx + j·spacing`.
///
/// The search is centred on the translate nearest to zero and extends
/// `window` translates either side; since the strip distance is monotone in
/// `|dx|`, any `window ≥ 0` yields the same value.
pub fn deck_min_distance(spacing: f64, dx: f64, y1: f64, y2: f64, window: i64) -> f64 {
    let j0 = (-dx / spacing).round() as i64;
    (j0 - window..=j0 + window)
        .map(|j| strip_distance(dx + j as f64 * spacing, y1, y2))
        .fold(f64::INFINITY, f64::min)
}

/// The lift of `p` to the strip under the universal covering of `A(R)`:
/// `ζ = (π/(2 log R))(θ + i u)`. The branch of `θ` is kept as given.
pub fn lift_to_strip(r: f64, p: LogPolarPoint) -> Result<ComplexValue, GeometryError> {
    let a = SymmetricAnnulus::new(r)?;
    if p.u.is_nan() || p.u.abs() >= a.log_radius() || !p.theta.is_finite() {
        return Err(outside(p.to_complex()));
    }
    let k = a.lift_scale();
    Ok(Complex64::new(k * p.theta, k * p.u))
}

/// Inverse of [`lift_to_strip`]: the covering projection.
pub fn project_from_strip(r: f64, zeta: ComplexValue) -> Result<LogPolarPoint, GeometryError> {
    let a = SymmetricAnnulus::new(r)?;
    let k = a.lift_scale();
    Ok(LogPolarPoint::new(zeta.im / k, zeta.re / k))
}

/// Hyperbolic distance between `z` and `w`.
pub fn distance(
    domain: CanonicalDomain,
    z: ComplexValue,
    w: ComplexValue,
) -> Result<f64, GeometryError> {
    distance_with_window(domain, z, w, DECK_WINDOW)
}

/// [`distance`] with an explicit deck-translate search window for the annulus.
pub fn distance_with_window(
    domain: CanonicalDomain,
    z: ComplexValue,
    w: ComplexValue,
    window: i64,
) -> Result<f64, GeometryError> {
    domain.check(z)?;
    domain.check(w)?;
    Ok(match domain {
        CanonicalDomain::UnitDisk => {
            let pseudo = (z - w).norm() / (Complex64::new(1.0, 0.0) - w.conj() * z).norm();
            2.0 * pseudo.min(1.0).atanh()
        }
        CanonicalDomain::RightHalfPlane => {
            2.0 * ((z - w).norm() / (2.0 * (z.re * w.re).sqrt())).asinh()
        }
        CanonicalDomain::HorizontalStrip => strip_distance(z.re - w.re, z.im, w.im),
        CanonicalDomain::Annulus(a) => {
            let r = a.outer_radius();
            let lz = lift_to_strip(r, LogPolarPoint::from_complex(z))?;
            let lw = lift_to_strip(r, LogPolarPoint::from_complex(w))?;
            deck_min_distance(a.deck_spacing(), lz.re - lw.re, lz.im, lw.im, window)
        }
    })
}

/// Hyperbolic length of a parametrised curve `t ↦ (γ(t), γ'(t))`, `t ∈ [0, 1]`.
pub fn curve_length<F>(domain: CanonicalDomain, curve: F, tol: f64) -> Result<f64, GeometryError>
where
    F: Fn(f64) -> (ComplexValue, ComplexValue),
{
    quadrature::integrate(
        |t| {
            let (p, v) = curve(t);
            Ok(density(domain, p)? * v.norm())
        },
        0.0,
        1.0,
        tol,
    )
}

const SEGMENT_PROBES: usize = 32;

/// Hyperbolic length of a polyline by adaptive quadrature of the density.
pub fn path_length(path: &PolylinePath) -> Result<f64, GeometryError> {
    path_length_with_tol(path, QUADRATURE_TOL)
}

pub fn path_length_with_tol(path: &PolylinePath, tol: f64) -> Result<f64, GeometryError> {
    let domain = path.ambient;
    let segments = path.vertices.len() - 1;
    let per_segment = tol / segments as f64;
    let mut total = 0.0;
    for pair in path.vertices.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let step = b - a;
        if step.norm() == 0.0 {
            continue;
        }
        for i in 1..SEGMENT_PROBES {
            domain.check(a + step * (i as f64 / SEGMENT_PROBES as f64))?;
        }
        let len = step.norm();
        total += quadrature::integrate(
            |t| Ok(density(domain, a + step * t)? * len),
            0.0,
            1.0,
            per_segment,
        )?;
    }
    Ok(total)
}

/// Length of the core geodesic `|z| = 1` of `A(R)` traversed `n` times: `2π²|n| / Mod A(R)`.
pub fn core_geodesic_length(r: f64, n: i64) -> Result<f64, GeometryError> {
    let a = SymmetricAnnulus::new(r)?;
    if n == 0 {
        return Err(GeometryError::InvalidWinding);
    }
    Ok(2.0 * PI * PI * n.unsigned_abs() as f64 / a.modulus())
}

/// Upper bound `Mod A(S) / Mod A(R)` on the winding of a holomorphic map `A(R) → A(S)`.
pub fn degree_bound(r: f64, s: f64) -> Result<f64, GeometryError> {
    let a = SymmetricAnnulus::new(r)?;
    let b = SymmetricAnnulus::new(s)?;
    Ok(b.modulus() / a.modulus())
}

/// Largest integer winding permitted by [`degree_bound`].
pub fn max_winding(r: f64, s: f64) -> Result<u64, GeometryError> {
    // Guard against 2.9999999999999996 for exact powers.
    let b = degree_bound(r, s)?;
    Ok((b + 1e-12).floor() as u64)
}

/// The disk automorphism `ζ ↦ (ζ + c)/(1 + c̄ζ)` restricted to the ray
/// through 0 towards `unit`, parametrised by hyperbolic arclength.
#[derive(Debug, Clone, Copy)]
struct DiskSegment {
    center: Complex64,
    unit: Complex64,
    /// `atanh` of the Euclidean length of the normalised ray, half the hyperbolic length.
    half_length: f64,
}

impl DiskSegment {
    fn through(z: Complex64, w: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let dir = (w - z) / (one - z.conj() * w);
        let a = dir.norm();
        Self {
            center: z,
            unit: if a > 0.0 { dir / a } else { one },
            half_length: a.atanh(),
        }
    }

    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        let s = t * self.half_length;
        let zeta = self.unit * s.tanh();
        let dzeta = self.unit * (self.half_length / s.cosh().powi(2));
        let denom = one + self.center.conj() * zeta;
        let p = (zeta + self.center) / denom;
        let dp = (1.0 - self.center.norm_sqr()) / (denom * denom) * dzeta;
        (p, dp)
    }
}

#[derive(Debug, Clone, Copy)]
enum Chart {
    Disk(DiskSegment),
    // Cayley image of a disk geodesic, then scaled.
    HalfPlane {
        disk: DiskSegment,
        scale: f64,
    },
    // Logarithm of a half-plane geodesic, then translated.
    Strip {
        disk: DiskSegment,
        scale: f64,
        shift: f64,
    },
    Annulus {
        disk: DiskSegment,
        scale: f64,
        shift: f64,
        lift: f64,
    },
}

/// The unique geodesic arc between two points, parametrised on `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct Geodesic {
    domain: CanonicalDomain,
    chart: Chart,
}

fn cayley(zeta: Complex64, dzeta: Complex64) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let d = one - zeta;
    ((one + zeta) / d, 2.0 / (d * d) * dzeta)
}

fn cayley_inverse(h: Complex64) -> Complex64 {
    (h - 1.0) / (h + 1.0)
}

fn half_plane_chart(z: Complex64, w: Complex64) -> (DiskSegment, f64) {
    // Dilations are isometries; normalise so the endpoints straddle |h| = 1.
    let scale = (z.norm() * w.norm()).sqrt();
    (
        DiskSegment::through(cayley_inverse(z / scale), cayley_inverse(w / scale)),
        scale,
    )
}

fn strip_chart(z: Complex64, w: Complex64) -> (DiskSegment, f64, f64) {
    let shift = 0.5 * (z.re + w.re);
    let (disk, scale) = half_plane_chart((z - shift).exp(), (w - shift).exp());
    (disk, scale, shift)
}

impl Geodesic {
    pub fn between(
        domain: CanonicalDomain,
        z: ComplexValue,
        w: ComplexValue,
    ) -> Result<Self, GeometryError> {
        domain.check(z)?;
        domain.check(w)?;
        let chart = match domain {
            CanonicalDomain::UnitDisk => Chart::Disk(DiskSegment::through(z, w)),
            CanonicalDomain::RightHalfPlane => {
                let (disk, scale) = half_plane_chart(z, w);
                Chart::HalfPlane { disk, scale }
            }
            CanonicalDomain::HorizontalStrip => {
                let (disk, scale, shift) = strip_chart(z, w);
                Chart::Strip { disk, scale, shift }
            }
            CanonicalDomain::Annulus(a) => {
                let r = a.outer_radius();
                let lz = lift_to_strip(r, LogPolarPoint::from_complex(z))?;
                let lw = lift_to_strip(r, LogPolarPoint::from_complex(w))?;
                let spacing = a.deck_spacing();
                let dx = lz.re - lw.re;
                let j0 = (-dx / spacing).round() as i64;
                let best = (j0 - DECK_WINDOW..=j0 + DECK_WINDOW)
                    .min_by(|&i, &j| {
                        let di = strip_distance(dx + i as f64 * spacing, lz.im, lw.im);
                        let dj = strip_distance(dx + j as f64 * spacing, lz.im, lw.im);
                        di.total_cmp(&dj)
                    })
                    .unwrap_or(j0);
                let lw = lw - Complex64::new(best as f64 * spacing, 0.0);
                let (disk, scale, shift) = strip_chart(lz, lw);
                Chart::Annulus {
                    disk,
                    scale,
                    shift,
                    lift: a.lift_scale(),
                }
            }
        };
        Ok(Self { domain, chart })
    }

    pub fn domain(&self) -> CanonicalDomain {
        self.domain
    }

    /// Point and velocity at parameter `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> (ComplexValue, ComplexValue) {
        match self.chart {
            Chart::Disk(d) => d.eval(t),
            Chart::HalfPlane { disk, scale } => {
                let (zeta, dz) = disk.eval(t);
                let (h, dh) = cayley(zeta, dz);
                (h * scale, dh * scale)
            }
            Chart::Strip { disk, scale, shift } => {
                let (zeta, dz) = disk.eval(t);
                let (h, dh) = cayley(zeta, dz);
                let h = h * scale;
                (h.ln() + shift, dh * scale / h)
            }
            Chart::Annulus {
                disk,
                scale,
                shift,
                lift,
            } => {
                let (zeta, dz) = disk.eval(t);
                let (h, dh) = cayley(zeta, dz);
                let h = h * scale;
                let s = h.ln() + shift;
                let ds = dh * scale / h;
                // z = exp(i·conj(s)/k) inverts ζ = k(θ + i u).
                let i = Complex64::new(0.0, 1.0);
                let p = (i * s.conj() / lift).exp();
                (p, p * i * ds.conj() / lift)
            }
        }
    }

    /// Hyperbolic length by quadrature of the density along the arc.
    pub fn length(&self, tol: f64) -> Result<f64, GeometryError> {
        curve_length(self.domain, |t| self.eval(t), tol)
    }

    /// Samples the arc at `segments + 1` equally spaced parameters.
    pub fn to_polyline(&self, segments: usize) -> Result<PolylinePath, GeometryError> {
        let n = segments.max(1);
        let vertices = (0..=n).map(|i| self.eval(i as f64 / n as f64).0).collect();
        PolylinePath::new(vertices, self.domain)
    }
}

/// Inverse Gudermannian `log tan(y/2 + π/4)`: hyperbolic height above the
/// real axis in the strip.
pub fn inverse_gudermannian(y: f64) -> f64 {
    y.tan().asinh()
}

/// Gudermannian function, inverse of [`inverse_gudermannian`].
pub fn gudermannian(g: f64) -> f64 {
    g.sinh().atan()
}

/// Polygonal approximation of the circle `|z| = radius` with `n` segments (closed).
pub fn circle_polyline(radius: f64, n: usize) -> Vec<ComplexValue> {
    (0..=n)
        .map(|k| Complex64::from_polar(radius, TAU * (k % n) as f64 / n as f64))
        .collect()
}
