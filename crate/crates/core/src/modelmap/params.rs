use std::f64::consts::{E, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::trace::{trace_phi_component, PhiComponent, DEFAULT_RESOLUTION};
use super::ModelError;

/// Number of four-stage cycles generated by default.
pub const DEFAULT_CYCLES: usize = 2;

/// Initial samples on the ellipse boundary when calibrating `λ`.
pub const CALIBRATION_SAMPLES: usize = 4096;

/// `λ` is calibrated against a clearance of `ε(1 + CALIBRATION_SLACK)`, so a
/// later certification at different sampling still clears `ε`.
pub const CALIBRATION_SLACK: f64 = 0.01;

const LAMBDA_TOL: f64 = 1e-9;
const CALIBRATION_DEPTH: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub r: f64,
    pub eps: f64,
    pub lambda: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(rename = "Rp")]
    pub rp: f64,
    pub delta: f64,
    pub margin: f64,
    pub l: Vec<f64>,
    pub m: Vec<f64>,
    pub x: Vec<f64>,
    /// Number of four-stage cycles; stage maps run over `0..4·cycles`.
    pub cycles: usize,
}

impl ModelParams {
    pub fn stages(&self) -> usize {
        4 * self.cycles
    }

    pub fn log_r(&self) -> f64 {
        self.r.ln()
    }

    /// Half-width (strips) or radius (disks) of `E_n`.
    pub fn e_extent(&self, n: usize) -> f64 {
        match n % 4 {
            0 => (2.0 * self.rp).ln(),
            1 => self.big_r,
            2 => 1.0 + self.delta,
            _ => self.log_r(),
        }
    }

    /// Gap required on each side of `m_n` by the sequence rules.
    fn rule_gap(&self, n: usize) -> f64 {
        match n % 4 {
            3 => self.log_r() + 1.0,
            _ => self.e_extent(n),
        }
    }

    /// `ε_n = ε/10ⁿ`.
    pub fn eps_sequence(&self) -> Vec<f64> {
        (0..self.stages())
            .map(|n| self.eps / 10f64.powi(n as i32))
            .collect()
    }

    /// Bound `∑ ε_m³ ≤ 1000ε³/999` on the distance between `g` and the model map.
    pub fn approximation_budget(&self) -> f64 {
        1000.0 * self.eps.powi(3) / 999.0
    }

    pub(crate) fn check_stage(&self, n: usize) -> Result<(), ModelError> {
        if n < self.stages() {
            Ok(())
        } else {
            Err(ModelError::StageOutOfRange {
                requested: n,
                available: self.stages(),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub holds: bool,
}

fn check(out: &mut Vec<InvariantCheck>, name: impl Into<String>, holds: bool) {
    out.push(InvariantCheck {
        name: name.into(),
        holds,
    });
}

/// Conditions on `(r, ε)` alone, checked before calibration.
fn admissibility(r: f64, eps: f64) -> Vec<InvariantCheck> {
    let mut out = Vec::new();
    check(&mut out, "2 < r < e", r > 2.0 && r < E);
    check(&mut out, "0 < eps < 1/r", eps > 0.0 && eps < 1.0 / r);
    check(&mut out, "eps < log r", eps < r.ln());
    check(&mut out, "log r + 2 eps < 1", r.ln() + 2.0 * eps < 1.0);
    out
}

/// Every defining inequality of the construction, in a fixed order.
pub fn invariant_checks(p: &ModelParams) -> Vec<InvariantCheck> {
    let mut out = admissibility(p.r, p.eps);
    let (lr, eps) = (p.log_r(), p.eps);
    check(
        &mut out,
        "0 < lambda < 1/2",
        p.lambda > 0.0 && p.lambda < 0.5,
    );
    check(&mut out, "R > r", p.big_r > p.r);
    check(&mut out, "1/R > eps", 1.0 / p.big_r > eps);
    check(
        &mut out,
        "1/Rp + eps < 1/R",
        1.0 / p.rp + eps < 1.0 / p.big_r,
    );
    check(&mut out, "Rp - eps > R", p.rp - eps > p.big_r);
    check(&mut out, "eps < 1/(2 Rp)", eps < 1.0 / (2.0 * p.rp));
    check(&mut out, "delta > eps", p.delta > eps);

    let n = p.stages();
    let lengths_ok = p.cycles >= 1 && p.l.len() == n + 1 && p.m.len() == n + 1 && p.x.len() == n;
    check(&mut out, "sequence lengths", lengths_ok);
    if !lengths_ok {
        return out;
    }
    check(&mut out, "l_0 = 1", p.l[0] == 1.0);
    for k in 0..n {
        let g = p.rule_gap(k);
        check(
            &mut out,
            format!("m_{k} - {g} > l_{k}"),
            p.m[k] - g > p.l[k],
        );
        check(
            &mut out,
            format!("l_{} > m_{k} + {g}", k + 1),
            p.l[k + 1] > p.m[k] + g,
        );
    }
    for k in 0..n {
        let x = p.x[k];
        if k % 4 == 2 {
            check(
                &mut out,
                format!("l_{} < x_{k} < m_{}", k + 1, k + 1),
                p.l[k + 1] < x && x < p.m[k + 1],
            );
            check(
                &mut out,
                format!("m_{} - x_{k} < log r + eps", k + 1),
                p.m[k + 1] - x < lr + eps,
            );
        } else {
            check(
                &mut out,
                format!("m_{k} < x_{k} < l_{}", k + 1),
                p.m[k] < x && x < p.l[k + 1],
            );
        }
        if k % 4 == 3 {
            check(
                &mut out,
                format!("x_{k} - m_{k} < log r + eps"),
                x - p.m[k] < lr + eps,
            );
        }
        // H_j grows to the right with j, so only j ≤ k (and F_{k+1} after a disk stage) can avoid L_k.
        let last = if k % 4 == 2 { k + 1 } else { k };
        let clear = (0..=last).all(|j| x > p.l[j] && (x - p.m[j]).abs() > p.e_extent(j));
        check(&mut out, format!("L_{k} misses F_0..F_{last}"), clear);
    }
    out
}

/// Returns the first violated invariant as an error.
pub fn validate(p: &ModelParams) -> Result<(), ModelError> {
    match invariant_checks(p).into_iter().find(|c| !c.holds) {
        Some(c) => Err(ModelError::InfeasibleParameters(c.name)),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub lambda: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(rename = "Rp")]
    pub rp: f64,
    /// Certified lower bound on `dist(ψ(annulus), ∂D)`.
    pub clearance: f64,
}

/// Lower bound for a Lipschitz clearance along a parametrised curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CurveBound {
    pub sampled_min: f64,
    pub certified: f64,
    pub witness: Complex64,
    pub passed: bool,
}

/// Branch-and-bound certification that `clearance(γ(t)) > target` on `[t0, t1]`.
///
/// Stops at the first segment that cannot be certified.
///
/// `clearance` must be 1-Lipschitz and `speed` must bound `|γ'|`, so a
/// segment of parameter length `h` loses at most `speed·h/2` between nodes.
pub(crate) fn certify_curve<G, C>(
    gamma: G,
    clearance: C,
    (t0, t1): (f64, f64),
    speed: f64,
    samples: usize,
    target: f64,
    max_depth: u32,
) -> CurveBound
where
    G: Fn(f64) -> Complex64,
    C: Fn(Complex64) -> f64,
{
    let n = samples.max(2);
    let h0 = (t1 - t0) / n as f64;
    let nodes: Vec<(f64, f64)> = (0..=n)
        .map(|k| {
            let t = t0 + h0 * k as f64;
            (t, clearance(gamma(t)))
        })
        .collect();
    let mut bound = CurveBound {
        sampled_min: f64::INFINITY,
        certified: f64::INFINITY,
        witness: gamma(t0),
        passed: true,
    };
    for &(t, c) in &nodes {
        if c < bound.sampled_min {
            bound.sampled_min = c;
            bound.witness = gamma(t);
        }
    }
    let mut stack: Vec<(f64, f64, f64, f64, u32)> = nodes
        .windows(2)
        .map(|w| (w[0].0, w[1].0, w[0].1, w[1].1, 0))
        .collect();
    while let Some((ta, tb, ca, cb, depth)) = stack.pop() {
        let lower = ca.min(cb) - 0.5 * speed * (tb - ta);
        if lower > target {
            bound.certified = bound.certified.min(lower);
            continue;
        }
        if depth >= max_depth || ca.min(cb) <= target {
            bound.certified = bound.certified.min(lower);
            bound.passed = false;
            return bound;
        }
        let tm = 0.5 * (ta + tb);
        let zm = gamma(tm);
        let cm = clearance(zm);
        if cm < bound.sampled_min {
            bound.sampled_min = cm;
            bound.witness = zm;
        }
        stack.push((ta, tm, ca, cm, depth + 1));
        stack.push((tm, tb, cm, cb, depth + 1));
    }
    bound
}

/// `ψ(r e^{it})` for `ψ(w) = λ(w + 1/w)`: the boundary of the image ellipse.
pub(crate) fn ellipse_point(lambda: f64, radius: f64, t: f64) -> Complex64 {
    let w = Complex64::from_polar(radius, t);
    lambda * (w + 1.0 / w)
}

pub(crate) fn ellipse_bound(
    d: &PhiComponent,
    lambda: f64,
    r: f64,
    samples: usize,
    target: f64,
    depth: u32,
) -> CurveBound {
    certify_curve(
        |t| ellipse_point(lambda, r, t),
        |z| d.signed_clearance(z),
        (0.0, TAU),
        lambda * (r + 1.0 / r),
        samples,
        target,
        depth,
    )
}

/// Chooses `λ`, `R` and `R'` for the given `(r, ε)`.
pub fn calibrate(r: f64, eps: f64) -> Result<Calibration, ModelError> {
    let d = trace_phi_component(r, eps, DEFAULT_RESOLUTION)?;
    calibrate_with(&d, r, eps)
}

pub(crate) fn calibrate_with(
    d: &PhiComponent,
    r: f64,
    eps: f64,
) -> Result<Calibration, ModelError> {
    let target = eps * (1.0 + CALIBRATION_SLACK);
    let fits = |lambda: f64| {
        ellipse_bound(d, lambda, r, CALIBRATION_SAMPLES, target, CALIBRATION_DEPTH).passed
    };
    let (mut lo, mut hi) = (1e-6, 0.5);
    if !fits(lo) {
        return Err(ModelError::CalibrationFailed(format!(
            "no admissible lambda above {lo}"
        )));
    }
    if fits(hi) {
        return Err(ModelError::CalibrationFailed(
            "lambda = 1/2 already fits inside D".into(),
        ));
    }
    while hi - lo > LAMBDA_TOL {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = lo;
    let clearance =
        ellipse_bound(d, lambda, r, CALIBRATION_SAMPLES, target, CALIBRATION_DEPTH).certified;

    // min |ψ| on |w| = R is λ(R − 1/R), attained at w = ±iR.
    let c = (1.0 + eps) / lambda;
    let big_r = 0.5 * (c + (c * c + 4.0).sqrt()) + LAMBDA_TOL;
    if big_r * eps >= 1.0 {
        return Err(ModelError::CalibrationFailed(format!(
            "1/R > eps fails with R = {big_r}"
        )));
    }
    let step = (10.0 * eps).max(2.0 * eps / (1.0 - big_r * eps));
    let mut rp = big_r + step;
    for _ in 0..10_000 {
        if 1.0 / rp + eps < 1.0 / big_r && rp - eps > big_r {
            return Ok(Calibration {
                lambda,
                big_r,
                rp,
                clearance,
            });
        }
        rp += step;
    }
    Err(ModelError::CalibrationFailed(format!(
        "no R' found above R = {big_r}"
    )))
}

/// Builds the sequences `l_n`, `m_n`, `x_n` greedily, each `margin` past its binding bound.
pub fn generate_params(r: f64, eps: f64, margin: f64) -> Result<ModelParams, ModelError> {
    generate_params_with(r, eps, margin, DEFAULT_CYCLES)
}

pub fn generate_params_with(
    r: f64,
    eps: f64,
    margin: f64,
    cycles: usize,
) -> Result<ModelParams, ModelError> {
    let d = trace_phi_component_checked(r, eps)?;
    generate_from_component(&d, r, eps, margin, cycles)
}

fn trace_phi_component_checked(r: f64, eps: f64) -> Result<PhiComponent, ModelError> {
    if let Some(c) = admissibility(r, eps).into_iter().find(|c| !c.holds) {
        return Err(ModelError::InfeasibleParameters(c.name));
    }
    trace_phi_component(r, eps, DEFAULT_RESOLUTION)
}

pub(crate) fn generate_from_component(
    d: &PhiComponent,
    r: f64,
    eps: f64,
    margin: f64,
    cycles: usize,
) -> Result<ModelParams, ModelError> {
    if let Some(c) = admissibility(r, eps).into_iter().find(|c| !c.holds) {
        return Err(ModelError::InfeasibleParameters(c.name));
    }
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(ModelError::InfeasibleParameters("margin > 0".into()));
    }
    if cycles == 0 {
        return Err(ModelError::InfeasibleParameters("cycles >= 1".into()));
    }
    let cal = calibrate_with(d, r, eps)?;
    let mut p = ModelParams {
        r,
        eps,
        lambda: cal.lambda,
        big_r: cal.big_r,
        rp: cal.rp,
        delta: 2.0 * eps,
        margin,
        l: vec![1.0],
        m: Vec::new(),
        x: Vec::new(),
        cycles,
    };
    let n = p.stages();
    for k in 0..=n {
        let g = p.rule_gap(k);
        let m = p.l[k] + g + margin;
        p.m.push(m);
        if k < n {
            p.l.push(m + g + margin);
        }
    }
    let lr = p.log_r();
    for k in 0..n {
        let x = match k % 4 {
            2 => p.m[k + 1] - lr - 0.5 * eps,
            3 => p.m[k] + lr + 0.5 * eps,
            _ => p.m[k] + p.e_extent(k) + 0.5 * margin,
        };
        p.x.push(x);
    }
    validate(&p)?;
    Ok(p)
}

/// Minimum of `|ψ|` over `samples` points on each circle `|w| = R^{±1}`.
pub fn sampled_min_modulus(lambda: f64, big_r: f64, samples: usize) -> f64 {
    [big_r, 1.0 / big_r]
        .iter()
        .flat_map(|&rad| {
            (0..samples)
                .map(move |k| ellipse_point(lambda, rad, TAU * k as f64 / samples as f64).norm())
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_parameters_validate() {
        let p = generate_params(2.5, 1e-3, 1.0).unwrap();
        assert!(invariant_checks(&p).iter().all(|c| c.holds));
        assert!(p.lambda < 0.5 && p.lambda > 0.2);
        assert!(p.big_r > 4.5 && p.big_r < 5.0, "R = {}", p.big_r);
        assert!(p.rp > p.big_r);
        assert_eq!((p.l.len(), p.m.len(), p.x.len()), (9, 9, 8));
    }

    #[test]
    fn rejects_inadmissible_inputs() {
        assert_eq!(
            generate_params(3.0, 1e-3, 1.0),
            Err(ModelError::InfeasibleParameters("2 < r < e".into()))
        );
        assert_eq!(
            generate_params(2.5, 0.5, 1.0),
            Err(ModelError::InfeasibleParameters("0 < eps < 1/r".into()))
        );
        assert_eq!(
            generate_params(2.7, 0.02, 1.0),
            Err(ModelError::InfeasibleParameters("log r + 2 eps < 1".into()))
        );
        assert!(generate_params(2.5, 1e-3, 0.0).is_err());
    }

    #[test]
    fn radius_clears_one_plus_eps() {
        let p = generate_params(2.5, 1e-3, 1.0).unwrap();
        let min = sampled_min_modulus(p.lambda, p.big_r, 4096);
        assert!(min > 1.0 + p.eps);
        // and R is not much larger than necessary
        assert!(sampled_min_modulus(p.lambda, p.big_r - 1e-6, 4096) < 1.0 + p.eps + 1e-5);
    }

    #[test]
    fn validator_names_broken_rule() {
        let mut p = generate_params(2.5, 1e-3, 1.0).unwrap();
        p.l[2] = p.m[1];
        assert!(
            matches!(validate(&p), Err(ModelError::InfeasibleParameters(name)) if name.starts_with("l_2 > m_1"))
        );
    }
}
