use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::system::SyntheticSystem;
use super::BoundaryError;

/// Boundary distances below this count as approaching the boundary.
pub const DEFAULT_THRESHOLD: f64 = 1e-6;

/// Share of the trace used for tail statistics.
pub const TAIL_FRACTION: f64 = 0.25;

pub const MIN_TRACE_LEN: usize = 10;

const MIN_TAIL: usize = 3;
const MIN_SUBSEQUENCE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEntry {
    pub n: usize,
    /// `dist(z_n, ∂Ũ_n)`.
    pub delta: f64,
    /// Nearest point of `∂Ũ_n` to `z_n`.
    pub witness: Complex64,
    pub point: Complex64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub entries: Vec<BoundaryEntry>,
}

impl BoundaryTrace {
    /// Builds a trace from bare distances, for classification only.
    pub fn from_deltas(deltas: &[f64]) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            entries: deltas
                .iter()
                .enumerate()
                .map(|(n, &delta)| BoundaryEntry {
                    n,
                    delta,
                    witness: zero,
                    point: zero,
                })
                .collect(),
        }
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.delta).collect()
    }
}

/// `δ_n(z_n)` with nearest-point witnesses for `n = 0..=stages`.
pub fn delta_sequence(
    system: &SyntheticSystem,
    z0: Complex64,
    stages: usize,
) -> Result<BoundaryTrace, BoundaryError> {
    let orbit = system.orbit(z0, stages)?;
    let entries = orbit
        .into_iter()
        .enumerate()
        .map(|(n, z)| {
            let (delta, witness) = system.domain(n)?.delta(z);
            Ok(BoundaryEntry {
                n,
                delta,
                witness,
                point: z,
            })
        })
        .collect::<Result<Vec<_>, BoundaryError>>()?;
    Ok(BoundaryTrace { entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryCase {
    /// `δ_n` stays bounded below.
    A,
    /// One subsequence approaches the boundary and another does not.
    B,
    /// `δ_n → 0`.
    C,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCall {
    pub case: BoundaryCase,
    pub threshold: f64,
    /// First stage of the tail window.
    pub tail_start: usize,
    /// Tail stages with `δ < threshold`.
    pub low: Vec<usize>,
    /// Tail stages with `δ ≥ threshold`.
    pub high: Vec<usize>,
}

/// Empirical case call on the last quarter of a finite trace.
///
/// (a) every tail entry exceeds `threshold`; (c) every tail entry is below
/// it; (b) both kinds recur at least twice. Anything else is inconclusive.
pub fn convergence_class(
    trace: &BoundaryTrace,
    threshold: f64,
) -> Result<ConvergenceCall, BoundaryError> {
    let len = trace.entries.len();
    if len < MIN_TRACE_LEN {
        return Err(BoundaryError::TraceTooShort {
            len,
            need: MIN_TRACE_LEN,
        });
    }
    let tail_len = ((len as f64 * TAIL_FRACTION).ceil() as usize).max(MIN_TAIL);
    let tail = &trace.entries[len - tail_len..];
    if tail.iter().any(|e| e.delta.is_nan() || e.delta < 0.0) {
        return Err(BoundaryError::Inconclusive(
            "negative or undefined distance in the tail".into(),
        ));
    }
    let (low, high): (Vec<&BoundaryEntry>, Vec<&BoundaryEntry>) =
        tail.iter().partition(|e| e.delta < threshold);
    let low: Vec<usize> = low.iter().map(|e| e.n).collect();
    let high: Vec<usize> = high.iter().map(|e| e.n).collect();
    let case = if low.is_empty() {
        BoundaryCase::A
    } else if high.is_empty() {
        BoundaryCase::C
    } else if low.len() >= MIN_SUBSEQUENCE && high.len() >= MIN_SUBSEQUENCE {
        BoundaryCase::B
    } else {
        return Err(BoundaryError::Inconclusive(format!(
            "{} tail entries below {threshold:e} and {} above",
            low.len(),
            high.len()
        )));
    };
    Ok(ConvergenceCall {
        case,
        threshold,
        tail_start: tail[0].n,
        low,
        high,
    })
}

#[cfg(test)]
mod tests {
    use super::super::system::SystemFamily;
    use super::*;

    fn system(f: SystemFamily) -> SyntheticSystem {
        SyntheticSystem::new(f).unwrap()
    }

    #[test]
    fn reference_traces_classify() {
        let tower = system(SystemFamily::Tower { r: 2.0, degree: 2 });
        let t = delta_sequence(&tower, tower.marked_point(), 9).unwrap();
        for e in &t.entries {
            let rn = 2f64.powi(2i32.pow(e.n as u32));
            assert!((e.delta - (rn - 1.0)).abs() <= 1e-12 * rn);
        }
        assert_eq!(
            convergence_class(&t, DEFAULT_THRESHOLD).unwrap().case,
            BoundaryCase::A
        );

        let s = system(SystemFamily::DiskApproach);
        let t = delta_sequence(&s, s.marked_point(), 40).unwrap();
        assert_eq!(
            convergence_class(&t, DEFAULT_THRESHOLD).unwrap().case,
            BoundaryCase::C
        );

        let s = system(SystemFamily::DiskAlternating);
        let t = delta_sequence(&s, s.marked_point(), 40).unwrap();
        let call = convergence_class(&t, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(call.case, BoundaryCase::B);
        assert!(call.low.iter().all(|n| n % 2 == 0));
        assert!(call.high.iter().all(|n| n % 2 == 1));
    }

    #[test]
    fn witnesses_realise_delta() {
        for f in [
            SystemFamily::DiskApproach,
            SystemFamily::StripContraction,
            SystemFamily::Tower { r: 2.0, degree: 2 },
        ] {
            let s = system(f);
            let t = delta_sequence(&s, s.marked_point() + Complex64::new(0.0, 0.1), 9).unwrap();
            for e in &t.entries {
                assert!(((e.point - e.witness).norm() - e.delta).abs() <= 1e-9 * e.delta.max(1.0));
            }
        }
    }

    #[test]
    fn short_or_mixed_traces_are_rejected() {
        assert!(matches!(
            convergence_class(&BoundaryTrace::from_deltas(&[1.0; 5]), DEFAULT_THRESHOLD),
            Err(BoundaryError::TraceTooShort { .. })
        ));
        let mut d = vec![1.0; 12];
        d[11] = 0.0;
        assert!(matches!(
            convergence_class(&BoundaryTrace::from_deltas(&d), DEFAULT_THRESHOLD),
            Err(BoundaryError::Inconclusive(_))
        ));
    }
}
