use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ModelError;

/// Closed curves must repeat their first vertex within this distance.
pub const CLOSURE_TOL: f64 = 1e-12;

const MAX_REFINE_DEPTH: u32 = 40;

/// An ordered list of samples; closed curves repeat the first point at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    points: Vec<Complex64>,
    closed: bool,
}

impl SampledCurve {
    pub fn open(points: Vec<Complex64>) -> Result<Self, ModelError> {
        if points.len() < 2 {
            return Err(ModelError::InvalidCurve("fewer than two samples".into()));
        }
        Ok(Self {
            points,
            closed: false,
        })
    }

    pub fn closed(points: Vec<Complex64>) -> Result<Self, ModelError> {
        if points.len() < 4 {
            return Err(ModelError::InvalidCurve(
                "a closed curve needs at least three distinct samples".into(),
            ));
        }
        let gap = (points[0] - points[points.len() - 1]).norm();
        if gap > CLOSURE_TOL {
            return Err(ModelError::InvalidCurve(format!(
                "endpoints differ by {gap:e}"
            )));
        }
        Ok(Self {
            points,
            closed: true,
        })
    }

    /// `|z − center| = radius` traversed once counter-clockwise with `n` segments.
    pub fn circle(center: Complex64, radius: f64, n: usize) -> Self {
        let n = n.max(3);
        let mut points: Vec<Complex64> = (0..n)
            .map(|k| center + Complex64::from_polar(radius, TAU * k as f64 / n as f64))
            .collect();
        points.push(points[0]);
        Self {
            points,
            closed: true,
        }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn euclidean_length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn translated(&self, offset: Complex64) -> Self {
        Self {
            points: self.points.iter().map(|z| z + offset).collect(),
            closed: self.closed,
        }
    }

    /// Inserts `factor − 1` evenly spaced points into every segment.
    pub fn refined(&self, factor: usize) -> Self {
        let factor = factor.max(1);
        let mut points = Vec::with_capacity((self.points.len() - 1) * factor + 1);
        for w in self.points.windows(2) {
            for j in 0..factor {
                points.push(w[0] + (w[1] - w[0]) * (j as f64 / factor as f64));
            }
        }
        points.push(self.points[self.points.len() - 1]);
        Self {
            points,
            closed: self.closed,
        }
    }
}

fn shifted_image<F: Fn(Complex64) -> Complex64>(
    map: &F,
    z: Complex64,
    target: Complex64,
) -> Result<Complex64, ModelError> {
    let w = map(z);
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(ModelError::NonFiniteImage(z));
    }
    let d = w - target;
    if d.norm() <= 1e-14 * (1.0 + target.norm()) {
        return Err(ModelError::TargetOnCurve);
    }
    Ok(d)
}

fn swept_angle<F: Fn(Complex64) -> Complex64>(
    map: &F,
    target: Complex64,
    (za, wa): (Complex64, Complex64),
    (zb, wb): (Complex64, Complex64),
    depth: u32,
) -> Result<f64, ModelError> {
    if (wb - wa).norm() < 0.1 * wa.norm().min(wb.norm()) {
        return Ok((wb / wa).arg());
    }
    if depth >= MAX_REFINE_DEPTH {
        return Err(ModelError::ResolutionInsufficient);
    }
    let zm = 0.5 * (za + zb);
    let wm = shifted_image(map, zm, target)?;
    Ok(swept_angle(map, target, (za, wa), (zm, wm), depth + 1)?
        + swept_angle(map, target, (zm, wm), (zb, wb), depth + 1)?)
}

/// Winding number of `map(curve)` about `target`, by continuous argument tracking.
///
/// Segments of the polyline are bisected until consecutive image points are
/// within a tenth of their distance to the target.
pub fn winding_number<F>(map: F, curve: &SampledCurve, target: Complex64) -> Result<i64, ModelError>
where
    F: Fn(Complex64) -> Complex64,
{
    if !curve.closed {
        return Err(ModelError::InvalidCurve(
            "winding number needs a closed curve".into(),
        ));
    }
    let mut images = Vec::with_capacity(curve.points.len());
    for &z in &curve.points {
        images.push((z, shifted_image(&map, z, target)?));
    }
    let mut total = 0.0;
    for w in images.windows(2) {
        total += swept_angle(&map, target, w[0], w[1], 0)?;
    }
    let turns = total / TAU;
    let k = turns.round();
    if (turns - k).abs() > 1e-6 {
        return Err(ModelError::ResolutionInsufficient);
    }
    Ok(k as i64)
}
