use num_complex::Complex64;
use rstar::primitives::Line;
use rstar::{PointDistance, RTree};

use super::winding::SampledCurve;
use super::ModelError;

/// Boundary vertices per traced component.
pub const DEFAULT_RESOLUTION: usize = 10_000;

// Rough length of the whole boundary, used only to turn a resolution into a step.
const BOUNDARY_LENGTH_GUESS: f64 = 5.5;
const NEWTON_TOL: f64 = 1e-14;
const NEWTON_ITERS: usize = 30;
const MAX_TURN: f64 = 0.1;

/// `φ(w) = 2w/(w² + 1) = 1/(w − i) + 1/(w + i)`.
pub fn phi(w: Complex64) -> Complex64 {
    2.0 * w / (w * w + 1.0)
}

pub fn phi_derivative(w: Complex64) -> Complex64 {
    let q = w * w + 1.0;
    2.0 * (1.0 - w * w) / (q * q)
}

/// The preimage of `s` under `φ` in the closed unit disk.
pub fn phi_inverse(s: Complex64) -> Complex64 {
    if s.norm() < 1e-300 {
        return Complex64::new(0.0, 0.0);
    }
    let root = (1.0 - s * s).sqrt();
    let a = (1.0 - root) / s;
    let b = (1.0 + root) / s;
    if a.norm() <= b.norm() {
        a
    } else {
        b
    }
}

/// The component `D` of `{|z| < 1, |Re φ(z)| < a}` together with its traced boundary.
#[derive(Debug, Clone)]
pub struct PhiComponent {
    a: f64,
    right: Vec<Complex64>,
    left: Vec<Complex64>,
    closed: SampledCurve,
    index: RTree<Line<[f64; 2]>>,
    step: f64,
}

fn xy(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn newton(a: f64, mut z: Complex64) -> Option<Complex64> {
    for _ in 0..NEWTON_ITERS {
        let f = phi(z).re - a;
        if f.abs() < NEWTON_TOL {
            return Some(z);
        }
        let d = phi_derivative(z);
        if d.norm() == 0.0 || !d.norm().is_finite() {
            return None;
        }
        // Gradient of Re φ is conj(φ'), so the gradient Newton step is f/φ'.
        z -= f / d;
    }
    ((phi(z).re - a).abs() < 1e3 * NEWTON_TOL).then_some(z)
}

fn unit_tangent(z: Complex64) -> Complex64 {
    let d = phi_derivative(z);
    let t = Complex64::new(d.im, d.re);
    t / t.norm()
}

/// Follows `Re φ = a` from the real axis towards the pole `sign·i`.
fn trace_half(
    a: f64,
    x0: f64,
    h: f64,
    sign: f64,
    cut: f64,
    max_steps: usize,
) -> Result<Vec<Complex64>, ModelError> {
    let pole = Complex64::new(0.0, sign);
    let mut z = Complex64::new(x0, 0.0);
    let mut pts = vec![z];
    let mut dir = unit_tangent(z) * sign;
    while (z - pole).norm() >= cut {
        if pts.len() > max_steps {
            return Err(ModelError::TraceDiverged(format!(
                "no approach to {pole} after {max_steps} steps"
            )));
        }
        let mut step = h;
        let next = loop {
            if step < h * 1e-6 {
                return Err(ModelError::TraceDiverged(format!(
                    "step collapsed near {z}"
                )));
            }
            let pred = z + dir * step;
            if let Some(c) = newton(a, pred) {
                let mut t = unit_tangent(c);
                if (t * dir.conj()).re < 0.0 {
                    t = -t;
                }
                if (t * dir.conj()).arg().abs() < MAX_TURN && (c - z).norm() < 2.0 * step {
                    dir = t;
                    break c;
                }
            }
            step *= 0.5;
        };
        if next.norm() >= 1.0 {
            return Err(ModelError::TraceDiverged(format!(
                "left the unit disk at {next}"
            )));
        }
        z = next;
        pts.push(z);
    }
    Ok(pts)
}

/// Traces `∂D` by predictor–corrector continuation of `Re φ = ±(log r − ε)`.
///
/// The two arcs meet the unit circle only at the poles `±i`. Tracing stops a
/// couple of steps short of each pole; the closed curve returned by
/// [`PhiComponent::closed_boundary`] bridges the gaps with chords that keep
/// the poles outside.
pub fn trace_phi_component(
    r: f64,
    eps: f64,
    resolution: usize,
) -> Result<PhiComponent, ModelError> {
    let a = r.ln() - eps;
    if !(a > 0.0 && a < 1.0) {
        return Err(ModelError::InfeasibleParameters(format!(
            "0 < log r − eps < 1 (got {a})"
        )));
    }
    let resolution = resolution.max(100);
    let h = BOUNDARY_LENGTH_GUESS / resolution as f64;
    let cut = 2.0 * h;
    // φ(x) = a on (0, 1)
    let x0 = (1.0 - (1.0 - a * a).sqrt()) / a;
    let up = trace_half(a, x0, h, 1.0, cut, 4 * resolution)?;
    let down = trace_half(a, x0, h, -1.0, cut, 4 * resolution)?;

    let mut right: Vec<Complex64> = down.into_iter().rev().collect();
    right.extend_from_slice(&up[1..]);
    let left: Vec<Complex64> = right.iter().map(|z| -z.conj()).collect();

    for (pole, half) in [(1.0, true), (-1.0, false)] {
        let closest = right
            .iter()
            .filter(|z| (z.im > 0.0) == half)
            .min_by(|p, q| (1.0 - p.norm()).total_cmp(&(1.0 - q.norm())))
            .copied()
            .ok_or_else(|| ModelError::TraceDiverged("empty half arc".into()))?;
        if (closest - Complex64::new(0.0, pole)).norm() > 1e-2 {
            return Err(ModelError::TraceDiverged(format!(
                "closest approach to the unit circle at {closest}, away from the pole"
            )));
        }
    }

    let mut closed = right.clone();
    closed.extend(left.iter().rev());
    closed.push(right[0]);
    let closed = SampledCurve::closed(closed)?;

    let i = Complex64::new(0.0, 1.0);
    let mut segments = Vec::with_capacity(2 * right.len() + 4);
    for arc in [&right, &left] {
        segments.extend(arc.windows(2).map(|w| Line::new(xy(w[0]), xy(w[1]))));
        segments.push(Line::new(xy(arc[arc.len() - 1]), xy(i)));
        segments.push(Line::new(xy(arc[0]), xy(-i)));
    }
    Ok(PhiComponent {
        a,
        right,
        left,
        closed,
        index: RTree::bulk_load(segments),
        step: h,
    })
}

impl PhiComponent {
    /// Half-width `log r − ε` of the target strip.
    pub fn half_width(&self) -> f64 {
        self.a
    }

    /// Continuation step length.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < 1.0 && phi(z).re.abs() < self.a
    }

    /// Euclidean distance from `z` to `∂D`.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let p = xy(z);
        self.index
            .nearest_neighbor(p)
            .map(|seg| seg.distance_2(&p).sqrt())
            .unwrap_or(f64::INFINITY)
    }

    /// Distance to `∂D`, negated outside `D`.
    pub fn signed_clearance(&self, z: Complex64) -> f64 {
        let d = self.boundary_distance(z);
        if self.contains(z) {
            d
        } else {
            -d
        }
    }

    /// The arc `Re φ = +a`, from near `−i` to near `i`.
    pub fn right_arc(&self) -> &[Complex64] {
        &self.right
    }

    /// The arc `Re φ = −a`, from near `−i` to near `i`.
    pub fn left_arc(&self) -> &[Complex64] {
        &self.left
    }

    /// Counter-clockwise boundary with the pole gaps bridged.
    pub fn closed_boundary(&self) -> &SampledCurve {
        &self.closed
    }

    /// Vertices of both arcs.
    pub fn boundary_points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.right.iter().chain(self.left.iter()).copied()
    }
}
