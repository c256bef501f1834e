//! The annulus power tower `F_n(z) = z^{D_n}` acting `A(R) → A(R^{D_n})`.
//!
//! Points are carried as a normalised log-modulus `ν = log|z| / log R`, which
//! every stage leaves unchanged, and an angle stored as a 64-bit fixed-point
//! fraction of a full turn. Multiplying the angle by `d` is then a wrapping
//! integer product, so angle reduction never accumulates rounding error and
//! collisions at dyadic stages are exact.

use std::f64::consts::{PI, TAU};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypgeo::{self, CanonicalDomain, GeometryError, LogPolarPoint, SymmetricAnnulus};

/// Beyond this cumulative degree [`pair_distance`] reports the continuum infimum.
pub const EXACTNESS_THRESHOLD: f64 = 1e6;

/// Angles carry 64 bits, so exact-mode distances stop at this stage.
pub const MAX_EXACT_STAGES: usize = 64;

/// Tolerance for Schwarz–Pick monotonicity of a trace.
pub const MONOTONE_TOL: f64 = 1e-12;

/// Tolerance for the eventually-isometric branch.
pub const ISOMETRY_TOL: f64 = 1e-10;

/// Tolerance between the final trace entry and the limit for generic pairs.
pub const LIMIT_TOL: f64 = 1e-5;

const TURN: f64 = 18_446_744_073_709_551_616.0; // 2^64

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TowerError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("degrees must be at least 1, got {0} at position {1}")]
    InvalidDegree(u64, usize),
    #[error("at least one degree must be at least 2")]
    NoGrowth,
    #[error("stage {requested} is beyond the {available} configured degrees")]
    StageOutOfRange { requested: usize, available: usize },
    #[error("points coincide within tolerance {0} in both coordinates")]
    AmbiguousClassification(f64),
    #[error("base point lies on the unit circle")]
    DegenerateBasePoint,
    #[error("tower points are at different stages ({0} and {1})")]
    StageMismatch(usize, usize),
    #[error("{verdict:?} check failed: {detail}")]
    VerdictMismatch { verdict: Verdict, detail: String },
}

/// Converts radians to fixed-point turns modulo one full turn.
pub fn radians_to_turns(theta: f64) -> u64 {
    let t = theta / TAU;
    let x = (t - t.floor()) * TURN;
    if x >= TURN {
        0
    } else {
        x as u64
    }
}

/// Representative in `[0, 2π)`.
pub fn turns_to_radians(turns: u64) -> f64 {
    turns as f64 / TURN * TAU
}

/// Shortest signed angular separation `a − b`, in `[−π, π)`.
pub fn signed_turn_gap(a: u64, b: u64) -> f64 {
    a.wrapping_sub(b) as i64 as f64 / TURN * TAU
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTower {
    r: f64,
    degrees: Vec<u64>,
    #[serde(skip)]
    cumulative: Vec<BigUint>,
}

impl PowerTower {
    pub fn new(r: f64, degrees: Vec<u64>) -> Result<Self, TowerError> {
        SymmetricAnnulus::new(r)?;
        if let Some((i, &d)) = degrees.iter().enumerate().find(|(_, &d)| d == 0) {
            return Err(TowerError::InvalidDegree(d, i));
        }
        if !degrees.iter().any(|&d| d >= 2) {
            return Err(TowerError::NoGrowth);
        }
        let mut cumulative = Vec::with_capacity(degrees.len() + 1);
        cumulative.push(BigUint::one());
        for &d in &degrees {
            let next = cumulative.last().expect("seeded with D_0") * d;
            cumulative.push(next);
        }
        Ok(Self {
            r,
            degrees,
            cumulative,
        })
    }

    /// `stages` copies of the same degree.
    pub fn constant(r: f64, degree: u64, stages: usize) -> Result<Self, TowerError> {
        Self::new(r, vec![degree; stages])
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn log_radius(&self) -> f64 {
        self.r.ln()
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn stages(&self) -> usize {
        self.degrees.len()
    }

    pub fn annulus(&self) -> SymmetricAnnulus {
        SymmetricAnnulus::new(self.r).expect("validated on construction")
    }

    /// Exact `D_n`.
    pub fn cumulative(&self, n: usize) -> Result<&BigUint, TowerError> {
        self.cumulative.get(n).ok_or(TowerError::StageOutOfRange {
            requested: n,
            available: self.degrees.len(),
        })
    }

    /// `D_n` rounded to `f64` (infinite once it exceeds the `f64` range).
    pub fn cumulative_f64(&self, n: usize) -> Result<f64, TowerError> {
        Ok(self.cumulative(n)?.to_f64().unwrap_or(f64::INFINITY))
    }

    fn check_stage(&self, n: usize) -> Result<(), TowerError> {
        self.cumulative(n).map(|_| ())
    }

    fn check_point(&self, p: LogPolarPoint) -> Result<(), TowerError> {
        if p.u.abs() < self.log_radius() && p.theta.is_finite() {
            Ok(())
        } else {
            Err(GeometryError::PointOutsideDomain {
                re: p.to_complex().re,
                im: p.to_complex().im,
            }
            .into())
        }
    }
}

/// A point of `A(R^{D_n})` in stage-invariant coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TowerPoint {
    nu_bits: u64,
    turns: u64,
    stage: usize,
}

impl TowerPoint {
    pub fn from_turns(nu: f64, turns: u64) -> Self {
        Self {
            nu_bits: nu.to_bits(),
            turns,
            stage: 0,
        }
    }

    pub fn nu(&self) -> f64 {
        f64::from_bits(self.nu_bits)
    }

    pub fn theta(&self) -> f64 {
        turns_to_radians(self.turns)
    }

    pub fn turns(&self) -> u64 {
        self.turns
    }

    pub fn stage(&self) -> usize {
        self.stage
    }
}

impl Serialize for TowerPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TowerPoint", 3)?;
        st.serialize_field("nu", &self.nu())?;
        st.serialize_field("theta", &self.theta())?;
        st.serialize_field("stage", &self.stage)?;
        st.end()
    }
}

/// Applies `n` stages to a point already in tower coordinates.
pub fn iterate_point(
    tower: &PowerTower,
    p: TowerPoint,
    n: usize,
) -> Result<TowerPoint, TowerError> {
    let end = p.stage + n;
    tower.check_stage(end)?;
    let turns = tower.degrees[p.stage..end]
        .iter()
        .fold(p.turns, |t, &d| t.wrapping_mul(d));
    Ok(TowerPoint {
        nu_bits: p.nu_bits,
        turns,
        stage: end,
    })
}

/// `F_n(z)` in tower coordinates.
pub fn iterate(tower: &PowerTower, z: LogPolarPoint, n: usize) -> Result<TowerPoint, TowerError> {
    tower.check_point(z)?;
    let p = TowerPoint::from_turns(z.u / tower.log_radius(), radians_to_turns(z.theta));
    iterate_point(tower, p, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairKind {
    SameCircle,
    SameRay,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairClass {
    pub kind: PairKind,
    pub tol: f64,
}

/// Leaf membership of a pair: same circle `|z| = |w|`, same ray `arg z = arg w`, or neither.
pub fn classify_pair(
    z: LogPolarPoint,
    w: LogPolarPoint,
    tol: f64,
) -> Result<PairClass, TowerError> {
    let same_circle = (z.u - w.u).abs() <= tol;
    let gap = signed_turn_gap(radians_to_turns(z.theta), radians_to_turns(w.theta)).abs();
    let same_ray = gap <= tol;
    let kind = match (same_circle, same_ray) {
        (true, true) => return Err(TowerError::AmbiguousClassification(tol)),
        (true, false) => PairKind::SameCircle,
        (false, true) => PairKind::SameRay,
        (false, false) => PairKind::Generic,
    };
    Ok(PairClass { kind, tol })
}

/// Smallest angular separation of a sampled pair, a sixteenth of a turn.
///
/// Stage distances of a same-circle pair are bounded by `ℓ(C_r)/D_n` whatever
/// the pair, so a fixed collapse ratio `d_N/d_0` can only be asked of pairs
/// whose angles are not already nearly equal.
pub const MIN_ANGULAR_GAP: f64 = TAU / 16.0;

/// Random pair of the requested kind with `|log|z|| ≤ 0.9 log R` and angles
/// at least [`MIN_ANGULAR_GAP`] apart.
pub fn sample_pair<G: Rng + ?Sized>(
    rng: &mut G,
    kind: PairKind,
    log_r: f64,
) -> (LogPolarPoint, LogPolarPoint) {
    let u1 = 0.9 * log_r * rng.gen_range(-1.0..1.0);
    let u2 = 0.9 * log_r * rng.gen_range(-1.0..1.0);
    let t1 = rng.gen_range(0.0..TAU);
    let t2 = (t1 + rng.gen_range(MIN_ANGULAR_GAP..TAU - MIN_ANGULAR_GAP)).rem_euclid(TAU);
    match kind {
        PairKind::SameCircle => (LogPolarPoint::new(u1, t1), LogPolarPoint::new(u1, t2)),
        PairKind::SameRay => (LogPolarPoint::new(u1, t1), LogPolarPoint::new(u2, t1)),
        PairKind::Generic => (LogPolarPoint::new(u1, t1), LogPolarPoint::new(u2, t2)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageDistance {
    pub value: f64,
    /// Set when the continuum infimum replaced the deck minimisation.
    pub asymptotic: bool,
}

/// Height of a point in the strip covering `A(R)` (and every `A(R^{D_n})`).
fn strip_height(tower: &PowerTower, u: f64) -> f64 {
    tower.annulus().lift_scale() * u
}

/// `d_{A(R^{D_n})}(F_n z, F_n w)` with the default exactness threshold.
pub fn pair_distance(
    tower: &PowerTower,
    z: LogPolarPoint,
    w: LogPolarPoint,
    n: usize,
) -> Result<StageDistance, TowerError> {
    pair_distance_with_threshold(tower, z, w, n, EXACTNESS_THRESHOLD)
}

pub fn pair_distance_with_threshold(
    tower: &PowerTower,
    z: LogPolarPoint,
    w: LogPolarPoint,
    n: usize,
    threshold: f64,
) -> Result<StageDistance, TowerError> {
    tower.check_point(z)?;
    tower.check_point(w)?;
    let dn = tower.cumulative_f64(n)?;
    let (yz, yw) = (strip_height(tower, z.u), strip_height(tower, w.u));
    if n > MAX_EXACT_STAGES || dn > threshold {
        return Ok(StageDistance {
            value: hypgeo::strip_distance(0.0, yz, yw),
            asymptotic: true,
        });
    }
    let pz = iterate(tower, z, n)?;
    let pw = iterate(tower, w, n)?;
    let k = tower.annulus().lift_scale();
    let dx = k * signed_turn_gap(pz.turns, pw.turns) / dn;
    let spacing = tower.annulus().deck_spacing() / dn;
    Ok(StageDistance {
        value: hypgeo::deck_min_distance(spacing, dx, yz, yw, hypgeo::DECK_WINDOW),
        asymptotic: false,
    })
}

/// `c(z, w) = |G(y_z) − G(y_w)|`, the limit of the stage distances.
pub fn limit_distance(
    tower: &PowerTower,
    z: LogPolarPoint,
    w: LogPolarPoint,
) -> Result<f64, TowerError> {
    tower.check_point(z)?;
    tower.check_point(w)?;
    let gz = hypgeo::inverse_gudermannian(strip_height(tower, z.u));
    let gw = hypgeo::inverse_gudermannian(strip_height(tower, w.u));
    Ok((gz - gw).abs())
}

/// `ℓ_{A(R)}(C_r) / D_n`: the length of the image of `|z| = r` traversed once.
pub fn circle_collapse_bound(tower: &PowerTower, r: f64, n: usize) -> Result<f64, TowerError> {
    let ann = CanonicalDomain::Annulus(tower.annulus());
    let rho = hypgeo::density(ann, num_complex::Complex64::new(r, 0.0))?;
    Ok(TAU * r * rho / tower.cumulative_f64(n)?)
}

/// `log|z| / log|z0|`; exact at every stage of the tower.
pub fn h_value(tower: &PowerTower, z: LogPolarPoint, z0: LogPolarPoint) -> Result<f64, TowerError> {
    tower.check_point(z)?;
    tower.check_point(z0)?;
    let l = tower.log_radius();
    let (nu, nu0) = (z.u / l, z0.u / l);
    if nu0 == 0.0 {
        return Err(TowerError::DegenerateBasePoint);
    }
    // Same arithmetic as `h_at_stage`, so the two agree bit for bit.
    Ok(nu / nu0)
}

/// [`h_value`] evaluated on iterated points of a common stage.
pub fn h_at_stage(p: TowerPoint, p0: TowerPoint) -> Result<f64, TowerError> {
    if p.stage != p0.stage {
        return Err(TowerError::StageMismatch(p.stage, p0.stage));
    }
    if p0.nu() == 0.0 {
        return Err(TowerError::DegenerateBasePoint);
    }
    Ok(p.nu() / p0.nu())
}

/// The mediating point `z*` with `|z*| = |z|` and `arg z* = arg w`.
pub fn mediating_point(z: LogPolarPoint, w: LogPolarPoint) -> LogPolarPoint {
    LogPolarPoint::new(z.u, w.theta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub n: usize,
    /// Exact `D_n` in decimal.
    pub cumulative: String,
    pub distance: f64,
    /// Triangle-inequality upper bound through the mediating point.
    pub bound: f64,
    pub asymptotic: bool,
    /// Whether `F_n z` and `F_n w` have distinct arguments (exact).
    pub angles_separated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceTrace {
    pub entries: Vec<TraceEntry>,
    pub monotone_nonincreasing: bool,
    pub eventually_constant: bool,
    pub limit_estimate: f64,
}

/// Upper bound for `d_n(z, w)`: `d_n(z, z*) ≤ ℓ(C_{|z|})/D_n` plus the radial distance `d_n(z*, w)`.
fn stage_upper_bound(
    tower: &PowerTower,
    z: LogPolarPoint,
    w: LogPolarPoint,
    n: usize,
) -> Result<f64, TowerError> {
    let radial = limit_distance(tower, z, w)?;
    let gap = signed_turn_gap(radians_to_turns(z.theta), radians_to_turns(w.theta));
    let circular = if gap == 0.0 {
        0.0
    } else {
        circle_collapse_bound(tower, z.u.exp(), n)?
    };
    Ok(circular + radial)
}

pub fn distance_trace(
    tower: &PowerTower,
    z: LogPolarPoint,
    w: LogPolarPoint,
    n_max: usize,
) -> Result<DistanceTrace, TowerError> {
    tower.check_stage(n_max)?;
    let mut entries = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let d = pair_distance(tower, z, w, n)?;
        let angles_separated = if d.asymptotic {
            true
        } else {
            iterate(tower, z, n)?.turns != iterate(tower, w, n)?.turns
        };
        entries.push(TraceEntry {
            n,
            cumulative: tower.cumulative(n)?.to_string(),
            distance: d.value,
            bound: stage_upper_bound(tower, z, w, n)?,
            asymptotic: d.asymptotic,
            angles_separated,
        });
    }
    let monotone_nonincreasing = entries
        .windows(2)
        .all(|e| e[1].distance <= e[0].distance + MONOTONE_TOL);
    let last = entries.last().map(|e| e.distance).unwrap_or(0.0);
    let tail = &entries[entries.len() / 2..];
    let eventually_constant = tail
        .iter()
        .all(|e| (e.distance - last).abs() < ISOMETRY_TOL);
    Ok(DistanceTrace {
        entries,
        monotone_nonincreasing,
        eventually_constant,
        limit_estimate: last,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Contracting,
    SemiContracting,
    Isometric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrichotomyReport {
    pub class: PairClass,
    pub verdict: Verdict,
    pub trace: DistanceTrace,
    /// `c(z, w)` from the closed form.
    pub limit: f64,
    /// Exact stage distance far beyond the exactness threshold.
    pub deep_stage_distance: f64,
    /// `|d(z, z*) − d(z*, w)|` at the deep stage.
    pub reverse_triangle_bound: f64,
    /// First stage at which the images of a generic pair share a ray.
    pub rays_merge_at: Option<usize>,
}

/// Stage used for the deep-limit comparison: `D_n ≥ 2^40` for `d ≡ 2`.
pub const DEEP_STAGE: usize = 40;

fn mismatch(verdict: Verdict, detail: String) -> TowerError {
    TowerError::VerdictMismatch { verdict, detail }
}

/// Computes `d_0 … d_N`, classifies the pair and checks the matching branch.
pub fn trichotomy_report(
    tower: &PowerTower,
    z: LogPolarPoint,
    w: LogPolarPoint,
    n: usize,
) -> Result<TrichotomyReport, TowerError> {
    let class = classify_pair(z, w, 0.0)?;
    let trace = distance_trace(tower, z, w, n)?;
    let limit = limit_distance(tower, z, w)?;
    let deep = DEEP_STAGE.max(n).min(tower.stages());
    // Exact deck minimisation, so the comparison with the limit is not circular.
    let exact =
        |a, b| pair_distance_with_threshold(tower, a, b, deep, f64::INFINITY).map(|d| d.value);
    let deep_stage_distance = exact(z, w)?;
    let zs = mediating_point(z, w);
    let reverse_triangle_bound = (exact(z, zs)? - exact(zs, w)?).abs();
    let d0 = trace.entries[0].distance;
    let dn = trace.limit_estimate;
    let rays_merge_at = match class.kind {
        PairKind::Generic => trace
            .entries
            .iter()
            .find(|e| !e.angles_separated)
            .map(|e| e.n),
        _ => None,
    };

    let verdict = match class.kind {
        PairKind::SameCircle => {
            let v = Verdict::Contracting;
            if let Some(e) = trace
                .entries
                .iter()
                .find(|e| e.distance > e.bound + MONOTONE_TOL)
            {
                return Err(mismatch(
                    v,
                    format!(
                        "d_{} = {} exceeds collapse bound {}",
                        e.n, e.distance, e.bound
                    ),
                ));
            }
            if !trace.monotone_nonincreasing {
                return Err(mismatch(v, "trace increases".into()));
            }
            v
        }
        PairKind::SameRay => {
            let v = Verdict::Isometric;
            if let Some(e) = trace
                .entries
                .iter()
                .find(|e| (e.distance - d0).abs() >= ISOMETRY_TOL)
            {
                return Err(mismatch(
                    v,
                    format!("d_{} = {} differs from d_0 = {}", e.n, e.distance, d0),
                ));
            }
            v
        }
        PairKind::Generic if rays_merge_at.is_some() => {
            // From the merge stage on the pair lies on one pulled-back ray,
            // so the distance stays at the limit.
            let v = Verdict::Isometric;
            let k = rays_merge_at.unwrap_or_default();
            if !trace.monotone_nonincreasing {
                return Err(mismatch(v, "trace increases".into()));
            }
            if let Some(e) = trace.entries[k..]
                .iter()
                .find(|e| (e.distance - limit).abs() >= ISOMETRY_TOL)
            {
                return Err(mismatch(
                    v,
                    format!(
                        "d_{} = {} differs from the limit {}",
                        e.n, e.distance, limit
                    ),
                ));
            }
            v
        }
        PairKind::Generic => {
            let v = Verdict::SemiContracting;
            if !trace.monotone_nonincreasing {
                return Err(mismatch(v, "trace increases".into()));
            }
            if let Some(e) = trace
                .entries
                .iter()
                .find(|e| !e.angles_separated || e.distance < limit - MONOTONE_TOL)
            {
                return Err(mismatch(
                    v,
                    format!("d_{} = {} reaches the limit {}", e.n, e.distance, limit),
                ));
            }
            if n > 0 && dn >= d0 {
                return Err(mismatch(
                    v,
                    format!("d_N = {dn} did not drop below d_0 = {d0}"),
                ));
            }
            if (dn - limit).abs() > LIMIT_TOL {
                return Err(mismatch(
                    v,
                    format!("d_N = {dn} is not within {LIMIT_TOL} of {limit}"),
                ));
            }
            v
        }
    };
    Ok(TrichotomyReport {
        class,
        verdict,
        trace,
        limit,
        deep_stage_distance,
        reverse_triangle_bound,
        rays_merge_at,
    })
}

/// Horizontal strip error at stage `n` caused by rounding the input angle.
///
/// The rounding is amplified by `D_n` and divided back by `D_n` in the
/// stage-`n` lift, so the budget does not grow with `n`.
pub fn angular_error_budget(tower: &PowerTower, n: usize) -> Result<f64, TowerError> {
    tower.check_stage(n)?;
    Ok(tower.annulus().lift_scale() * PI * f64::EPSILON)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_4};

    fn lp(modulus: f64, theta: f64) -> LogPolarPoint {
        LogPolarPoint::from_polar(modulus, theta)
    }

    #[test]
    fn iterate_examples() {
        let t = PowerTower::constant(2.0, 2, 10).unwrap();
        let p = iterate(&t, LogPolarPoint::new(0.0, FRAC_PI_4), 3).unwrap();
        assert_eq!((p.nu(), p.theta(), p.stage()), (0.0, 0.0, 3));

        let z = LogPolarPoint::new(0.3, 1.2);
        let p = iterate(&t, z, 0).unwrap();
        assert!((p.theta() - 1.2).abs() < 1e-15 && p.stage() == 0);

        let t = PowerTower::new(E, vec![3, 2]).unwrap();
        let p = iterate(&t, LogPolarPoint::new(0.5, 0.1), 2).unwrap();
        assert_eq!(p.nu(), 0.5);
        assert!((p.theta() - 0.6).abs() < 1e-14);
        assert_eq!(t.cumulative(2).unwrap().to_string(), "6");
    }

    #[test]
    fn iterate_errors() {
        let t = PowerTower::constant(2.0, 2, 4).unwrap();
        assert!(matches!(
            iterate(&t, LogPolarPoint::new(0.0, 0.0), 5),
            Err(TowerError::StageOutOfRange {
                requested: 5,
                available: 4
            })
        ));
        assert!(matches!(
            iterate(&t, LogPolarPoint::new(1.0, 0.0), 1),
            Err(TowerError::Geometry(_))
        ));
        assert_eq!(PowerTower::new(2.0, vec![1, 1]), Err(TowerError::NoGrowth));
        assert_eq!(
            PowerTower::new(2.0, vec![2, 0]),
            Err(TowerError::InvalidDegree(0, 1))
        );
    }

    #[test]
    fn classify_examples() {
        let c = classify_pair(lp(1.5, 0.0), lp(1.5, PI / 3.0), 0.0).unwrap();
        assert_eq!(c.kind, PairKind::SameCircle);
        let c = classify_pair(lp(1.2, 1.0), lp(1.7, 1.0), 0.0).unwrap();
        assert_eq!(c.kind, PairKind::SameRay);
        let c = classify_pair(lp(1.2, 0.0), lp(1.7, 1.0), 0.0).unwrap();
        assert_eq!(c.kind, PairKind::Generic);
        assert!(matches!(
            classify_pair(lp(1.2, 0.0), lp(1.2, 0.0), 0.0),
            Err(TowerError::AmbiguousClassification(_))
        ));
        // Same ray on another branch; 0.5 + 2π is not exact in f64.
        let c = classify_pair(lp(1.2, 0.5), lp(1.7, 0.5 + TAU), 1e-12).unwrap();
        assert_eq!(c.kind, PairKind::SameRay);
    }

    #[test]
    fn same_ray_distance_is_constant() {
        let t = PowerTower::constant(2.0, 2, 30).unwrap();
        let (z, w) = (lp(1.2, 1.0), lp(0.7, 1.0));
        let d0 = hypgeo::distance(
            CanonicalDomain::annulus(2.0).unwrap(),
            z.to_complex(),
            w.to_complex(),
        )
        .unwrap();
        for n in 0..=30 {
            assert!((pair_distance(&t, z, w, n).unwrap().value - d0).abs() < 1e-12);
        }
        assert!((limit_distance(&t, z, w).unwrap() - d0).abs() < 1e-12);
    }

    #[test]
    fn same_circle_dominated_by_collapse_bound() {
        let t = PowerTower::constant(2.0, 2, 20).unwrap();
        let (z, w) = (lp(1.5, 0.0), lp(1.5, PI / 3.0));
        for n in 0..=20 {
            let d = pair_distance(&t, z, w, n).unwrap().value;
            assert!(d <= circle_collapse_bound(&t, 1.5, n).unwrap());
        }
        assert_eq!(limit_distance(&t, z, w).unwrap(), 0.0);
    }

    #[test]
    fn collapse_bound_examples() {
        let t = PowerTower::constant(E, 2, 3).unwrap();
        assert!((circle_collapse_bound(&t, 1.0, 3).unwrap() - PI * PI / 8.0).abs() < 1e-14);
        let near = circle_collapse_bound(&t, E - 1e-9, 1).unwrap();
        assert!(near > 1e8);
        assert!(circle_collapse_bound(&t, E, 1).is_err());
    }

    #[test]
    fn generic_limit_matches_deep_stage() {
        let t = PowerTower::constant(2.0, 2, 40).unwrap();
        let (z, w) = (lp(1.5, 0.0), lp(1.2, FRAC_PI_2));
        let c = limit_distance(&t, z, w).unwrap();
        let d0 = hypgeo::distance(
            CanonicalDomain::annulus(2.0).unwrap(),
            z.to_complex(),
            w.to_complex(),
        )
        .unwrap();
        assert!(0.0 < c && c < d0);
        let deep = pair_distance(&t, z, w, 40).unwrap();
        assert!(deep.asymptotic);
        assert!((deep.value - c).abs() < 1e-6);
    }

    #[test]
    fn generic_trace_has_plateaus() {
        // The angular gap min_k |Δθ − 2πk/D_n| does not shrink at every stage.
        let t = PowerTower::constant(2.0, 2, 12).unwrap();
        let (z, w) = (lp(1.5, 0.0), lp(1.2, 0.1));
        let tr = distance_trace(&t, z, w, 12).unwrap();
        let flat = tr
            .entries
            .windows(2)
            .filter(|e| e[1].distance == e[0].distance)
            .count();
        assert!(flat > 0);
        assert!(tr.monotone_nonincreasing);
    }

    #[test]
    fn trichotomy_verdicts() {
        let t = PowerTower::constant(2.0, 2, 40).unwrap();
        let r = trichotomy_report(&t, lp(1.5, 0.0), lp(1.5, PI / 3.0), 20).unwrap();
        assert_eq!(r.verdict, Verdict::Contracting);
        let e = &r.trace.entries;
        assert!(e[20].distance < 1e-4 * e[0].distance);
        let r = trichotomy_report(&t, lp(1.2, 1.0), lp(1.7, 1.0), 20).unwrap();
        assert_eq!(r.verdict, Verdict::Isometric);
        let r = trichotomy_report(&t, lp(1.5, 0.3), lp(1.2, 2.0), 20).unwrap();
        assert_eq!(r.verdict, Verdict::SemiContracting);
        assert!(r.reverse_triangle_bound <= r.limit + 1e-9);
        assert!(r.limit <= r.trace.entries[0].distance);
        assert_eq!(r.rays_merge_at, None);
    }

    #[test]
    fn dyadic_angle_gap_merges_rays() {
        // A quarter-turn gap closes at stage 2, after which the pair shares a ray.
        let t = PowerTower::constant(2.0, 2, 40).unwrap();
        let r = trichotomy_report(&t, lp(1.5, 0.0), lp(1.2, FRAC_PI_2), 20).unwrap();
        assert_eq!(r.class.kind, PairKind::Generic);
        assert_eq!(r.verdict, Verdict::Isometric);
        assert_eq!(r.rays_merge_at, Some(2));
        let e = &r.trace.entries;
        assert!(e[1].distance > r.limit && e[0].distance >= e[1].distance);
        assert!(e[2..].iter().all(|e| (e.distance - r.limit).abs() < 1e-10));
    }

    #[test]
    fn h_examples() {
        let t = PowerTower::constant(E * E * 1.1, 2, 8).unwrap();
        let z0 = lp(E * E, 0.3);
        assert_eq!(h_value(&t, z0, z0).unwrap(), 1.0);
        assert_eq!(h_value(&t, lp(E, 1.0), z0).unwrap(), 0.5);
        assert_eq!(
            h_value(&t, z0, lp(1.0, 2.0)),
            Err(TowerError::DegenerateBasePoint)
        );
        let z = lp(1.7, 2.0);
        let base = h_value(&t, z, z0).unwrap();
        for n in 0..=8 {
            let h = h_at_stage(iterate(&t, z, n).unwrap(), iterate(&t, z0, n).unwrap()).unwrap();
            assert_eq!(h, base);
        }
    }

    #[test]
    fn dyadic_collisions_are_exact() {
        let t = PowerTower::constant(2.0, 2, 16).unwrap();
        let base = TowerPoint::from_turns(0.3, 0x1234_5678_9abc_def0);
        for k in 1..=16usize {
            let step = 1u64 << (64 - k);
            for j in [1u64, 3, 5] {
                let other =
                    TowerPoint::from_turns(0.3, base.turns().wrapping_add(j.wrapping_mul(step)));
                let a = iterate_point(&t, base, k).unwrap();
                let b = iterate_point(&t, other, k).unwrap();
                assert_eq!(a, b);
                if k > 1 {
                    assert_ne!(
                        iterate_point(&t, base, k - 1).unwrap(),
                        iterate_point(&t, other, k - 1).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn odd_degree_collisions_are_close() {
        let t = PowerTower::constant(2.0, 3, 6).unwrap();
        let z = LogPolarPoint::new(0.2, 0.4);
        for k in 1..=6usize {
            let dk = 3f64.powi(k as i32);
            let w = LogPolarPoint::new(0.2, 0.4 + TAU / dk);
            let a = iterate(&t, z, k).unwrap();
            let b = iterate(&t, w, k).unwrap();
            assert!(signed_turn_gap(a.turns(), b.turns()).abs() < 1e-12);
        }
    }

    #[test]
    fn cube_map_is_local_isometry_on_rays() {
        let t = PowerTower::new(2.0, vec![3]).unwrap();
        assert!((hypgeo::degree_bound(2.0, 8.0).unwrap() - 3.0).abs() < 1e-15);
        let (z, w) = (lp(1.3, 0.4), lp(0.6, 0.4));
        let d0 = pair_distance(&t, z, w, 0).unwrap().value;
        let d1 = pair_distance(&t, z, w, 1).unwrap().value;
        assert!((d0 - d1).abs() < 1e-10);
    }
}
