//! Connectivity arithmetic and the decision tables that map the geometry of
//! a wandering orbit `U_n` to its internal dynamics.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Minimum signature length for period detection.
pub const MIN_SIGNATURE_LEN: usize = 8;

/// Relative tolerance for "constant" modulus sequences.
pub const MODULUS_RTOL: f64 = 1e-12;

/// Connectivity in `ℕ ∪ {∞}`. Serialised as an integer or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connectivity {
    Finite(u64),
    Infinite,
}

impl Connectivity {
    pub fn is_finite(&self) -> bool {
        matches!(self, Connectivity::Finite(_))
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Connectivity::Finite(k) => write!(f, "{k}"),
            Connectivity::Infinite => f.write_str("inf"),
        }
    }
}

impl From<u64> for Connectivity {
    fn from(k: u64) -> Self {
        Connectivity::Finite(k)
    }
}

impl Serialize for Connectivity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Connectivity::Finite(k) => s.serialize_u64(*k),
            Connectivity::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Connectivity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(k) => Ok(Connectivity::Finite(k)),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "∞") => {
                Ok(Connectivity::Infinite)
            }
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "unknown connectivity {t:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SilhouetteError {
    #[error("surgery gives connectivity {0} < 1")]
    InfeasibleSurgery(i128),
    #[error("infinite degree: the map covers every value infinitely often, so the finite formula does not apply")]
    InfiniteDegree,
    #[error("degree must be at least 1")]
    InvalidDegree,
    #[error("degree enumeration needs connectivity at least 3, got {0}")]
    OutOfScope(u64),
    #[error("modulus must be positive and finite, got {0}")]
    InvalidModulus(f64),
    #[error("signature has {have} entries, need at least {need}")]
    InsufficientData { have: usize, need: usize },
    #[error("no eventual connectivity (period {period:?})")]
    NoEventualConnectivity {
        period: Option<usize>,
        bounded: BoundednessPattern,
    },
    #[error("unclassifiable: {0}")]
    Unclassifiable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RHInstance {
    pub c_v: Connectivity,
    pub degree: Connectivity,
    pub delta: u64,
}

/// `c(U) = n·(c(V) − 2) + δ + 2` for a proper map `U → V` of finite degree `n`.
pub fn riemann_hurwitz(inst: RHInstance) -> Result<Connectivity, SilhouetteError> {
    let n = match inst.degree {
        Connectivity::Infinite => return Err(SilhouetteError::InfiniteDegree),
        Connectivity::Finite(0) => return Err(SilhouetteError::InvalidDegree),
        Connectivity::Finite(n) => n,
    };
    let c_v = match inst.c_v {
        Connectivity::Infinite => return Ok(Connectivity::Infinite),
        Connectivity::Finite(c) => c,
    };
    let c_u = n as i128 * (c_v as i128 - 2) + inst.delta as i128 + 2;
    if c_u < 1 {
        return Err(SilhouetteError::InfeasibleSurgery(c_u));
    }
    Ok(Connectivity::Finite(c_u as u64))
}

/// All `(m, δ)` with `m ≥ 1`, `δ ≥ 0` and `k − 2 = m(k − 2) + δ`.
pub fn feasible_degrees(k: u64) -> Result<BTreeSet<(u64, u64)>, SilhouetteError> {
    if k < 3 {
        return Err(SilhouetteError::OutOfScope(k));
    }
    let excess = k - 2;
    Ok((1..)
        .take_while(|m| m * excess <= excess)
        .map(|m| (m, excess - m * excess))
        .collect())
}

/// `Mod U_n = D_n · mod0`, starting with `n = 0`.
pub fn modulus_growth(mod0: f64, degrees: &[u64]) -> Result<Vec<f64>, SilhouetteError> {
    if !(mod0 > 0.0 && mod0.is_finite()) {
        return Err(SilhouetteError::InvalidModulus(mod0));
    }
    if degrees.contains(&0) {
        return Err(SilhouetteError::InvalidDegree);
    }
    let mut out = Vec::with_capacity(degrees.len() + 1);
    out.push(mod0);
    for &d in degrees {
        let last = *out.last().expect("seeded");
        out.push(last * d as f64);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignatureEntry {
    pub connectivity: Connectivity,
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivitySignature {
    pub entries: Vec<SignatureEntry>,
    pub source: String,
}

impl ConnectivitySignature {
    pub fn new(source: impl Into<String>, entries: Vec<SignatureEntry>) -> Self {
        Self {
            entries,
            source: source.into(),
        }
    }

    /// Repeats `pattern` of `(connectivity, bounded)` until `len` entries exist.
    pub fn periodic(
        source: impl Into<String>,
        pattern: &[(Connectivity, bool)],
        len: usize,
    ) -> Self {
        let entries = pattern
            .iter()
            .cycle()
            .take(len)
            .map(|&(connectivity, bounded)| SignatureEntry {
                connectivity,
                bounded,
            })
            .collect();
        Self::new(source, entries)
    }

    pub fn connectivities(&self) -> Vec<Connectivity> {
        self.entries.iter().map(|e| e.connectivity).collect()
    }

    pub fn bounded_flags(&self) -> Vec<bool> {
        self.entries.iter().map(|e| e.bounded).collect()
    }
}

/// The periodic rule with the longest suffix, as `(period, start index)`.
///
/// Candidates need at least two full repetitions; ties go to the shorter period.
pub fn periodic_suffix<T: PartialEq>(seq: &[T]) -> Option<(usize, usize)> {
    let len = seq.len();
    let mut best: Option<(usize, usize)> = None;
    for p in 1..=len / 2 {
        let mut start = len - p;
        while start > 0 && seq[start - 1] == seq[start - 1 + p] {
            start -= 1;
        }
        let coverage = len - start;
        if coverage < 2 * p {
            continue;
        }
        if best.is_none_or(|(_, s)| coverage > len - s) {
            best = Some((p, start));
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundednessPattern {
    Eventually { bounded: bool },
    Periodic { pattern: Vec<bool> },
    Irregular,
}

fn boundedness_pattern(flags: &[bool]) -> BoundednessPattern {
    match periodic_suffix(flags) {
        Some((1, start)) => BoundednessPattern::Eventually {
            bounded: flags[start],
        },
        Some((p, start)) => BoundednessPattern::Periodic {
            pattern: aligned_cycle(flags, p, start),
        },
        None => BoundednessPattern::Irregular,
    }
}

/// One period of the suffix, rotated to start at an index divisible by `p`.
fn aligned_cycle<T: Clone>(seq: &[T], p: usize, start: usize) -> Vec<T> {
    let first = start.div_ceil(p) * p;
    seq[first..first + p].to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventualConnectivity {
    pub k: Connectivity,
    /// First index of the constant suffix.
    pub from: usize,
    pub bounded: BoundednessPattern,
}

/// Detects a constant suffix `c(U_n) = k`, or reports the period of the suffix rule.
pub fn eventual_connectivity(
    sig: &ConnectivitySignature,
) -> Result<EventualConnectivity, SilhouetteError> {
    let have = sig.entries.len();
    if have < MIN_SIGNATURE_LEN {
        return Err(SilhouetteError::InsufficientData {
            have,
            need: MIN_SIGNATURE_LEN,
        });
    }
    let conn = sig.connectivities();
    let bounded = boundedness_pattern(&sig.bounded_flags());
    match periodic_suffix(&conn) {
        Some((1, from)) => Ok(EventualConnectivity {
            k: conn[from],
            from,
            bounded,
        }),
        Some((p, _)) => Err(SilhouetteError::NoEventualConnectivity {
            period: Some(p),
            bounded,
        }),
        None => Err(SilhouetteError::NoEventualConnectivity {
            period: None,
            bounded,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DynamicsClass {
    Contracting,
    SemiContracting,
    EventuallyIsometric,
    Bimodal,
    Trimodal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsVerdict {
    pub class: DynamicsClass,
    pub contracting_lamination: Option<String>,
    pub isometric_lamination: Option<String>,
    pub eventual_connectivity: Option<Connectivity>,
}

impl DynamicsVerdict {
    fn plain(class: DynamicsClass, k: Option<Connectivity>) -> Self {
        Self {
            class,
            contracting_lamination: None,
            isometric_lamination: None,
            eventual_connectivity: k,
        }
    }

    /// Single-line JSON record.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("verdict serialises")
    }
}

const CONTRACTING_LEAVES: &str = "level curves of the limiting harmonic function";
const ISOMETRIC_LEAVES: &str = "curves transversal to the contracting leaves";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ModulusTrend {
    Constant,
    Growing,
    Other,
}

fn modulus_trend(moduli: &[f64]) -> ModulusTrend {
    let tail = &moduli[moduli.len() / 2..];
    if tail.len() < 2 {
        return ModulusTrend::Other;
    }
    let first = tail[0];
    let last = tail[tail.len() - 1];
    if tail
        .iter()
        .all(|m| (m - first).abs() <= MODULUS_RTOL * first.abs())
    {
        ModulusTrend::Constant
    } else if tail.windows(2).all(|w| w[1] >= w[0]) && last > first {
        ModulusTrend::Growing
    } else {
        ModulusTrend::Other
    }
}

/// Maps a connectivity signature (plus optional moduli of `U_n`) to a dynamics class.
///
/// With `baker` set, the connectivity of `U` itself (the first entry) decides
/// between trimodal and bimodal.
pub fn classify_silhouette(
    sig: &ConnectivitySignature,
    moduli: Option<&[f64]>,
    baker: bool,
) -> Result<DynamicsVerdict, SilhouetteError> {
    if baker {
        let first = sig
            .entries
            .first()
            .ok_or(SilhouetteError::InsufficientData { have: 0, need: 1 })?;
        let k = eventual_connectivity(sig).ok().map(|e| e.k);
        return Ok(match first.connectivity {
            Connectivity::Finite(_) => DynamicsVerdict {
                class: DynamicsClass::Trimodal,
                contracting_lamination: Some(CONTRACTING_LEAVES.into()),
                isometric_lamination: Some(ISOMETRIC_LEAVES.into()),
                eventual_connectivity: k,
            },
            Connectivity::Infinite => DynamicsVerdict {
                class: DynamicsClass::Bimodal,
                contracting_lamination: Some(CONTRACTING_LEAVES.into()),
                isometric_lamination: None,
                eventual_connectivity: k,
            },
        });
    }
    let ev = eventual_connectivity(sig)?;
    match ev.k {
        Connectivity::Finite(k) if k >= 3 => Ok(DynamicsVerdict::plain(
            DynamicsClass::EventuallyIsometric,
            Some(ev.k),
        )),
        Connectivity::Finite(2) => {
            let moduli = moduli.ok_or_else(|| {
                SilhouetteError::Unclassifiable(
                    "eventual connectivity 2 needs moduli of U_n".into(),
                )
            })?;
            if let Some(&bad) = moduli.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
                return Err(SilhouetteError::InvalidModulus(bad));
            }
            match modulus_trend(moduli) {
                ModulusTrend::Constant => Ok(DynamicsVerdict::plain(
                    DynamicsClass::EventuallyIsometric,
                    Some(ev.k),
                )),
                ModulusTrend::Growing => Ok(DynamicsVerdict {
                    class: DynamicsClass::Trimodal,
                    contracting_lamination: Some(CONTRACTING_LEAVES.into()),
                    isometric_lamination: Some(ISOMETRIC_LEAVES.into()),
                    eventual_connectivity: Some(ev.k),
                }),
                ModulusTrend::Other => Err(SilhouetteError::Unclassifiable(
                    "moduli are neither constant nor increasing".into(),
                )),
            }
        }
        Connectivity::Finite(k) => Err(SilhouetteError::Unclassifiable(format!(
            "eventual connectivity {k} is outside the multiply connected table"
        ))),
        Connectivity::Infinite => Err(SilhouetteError::Unclassifiable(
            "infinite eventual connectivity needs the Baker flag".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Connectivity::{Finite, Infinite};

    fn sig(values: &[u64]) -> ConnectivitySignature {
        ConnectivitySignature::new(
            "test",
            values
                .iter()
                .map(|&k| SignatureEntry {
                    connectivity: Finite(k),
                    bounded: true,
                })
                .collect(),
        )
    }

    #[test]
    fn riemann_hurwitz_examples() {
        let rh = |c, n, d| {
            riemann_hurwitz(RHInstance {
                c_v: Finite(c),
                degree: Finite(n),
                delta: d,
            })
        };
        assert_eq!(rh(2, 3, 0), Ok(Finite(2)));
        assert_eq!(rh(1, 2, 1), Ok(Finite(1)));
        assert_eq!(rh(3, 2, 0), Ok(Finite(4)));
        assert_eq!(rh(1, 3, 0), Err(SilhouetteError::InfeasibleSurgery(-1)));
        assert_eq!(rh(2, 0, 0), Err(SilhouetteError::InvalidDegree));
        let inf = riemann_hurwitz(RHInstance {
            c_v: Finite(3),
            degree: Infinite,
            delta: 0,
        });
        assert_eq!(inf, Err(SilhouetteError::InfiniteDegree));
    }

    #[test]
    fn feasible_degree_examples() {
        let only = BTreeSet::from([(1, 0)]);
        assert_eq!(feasible_degrees(3).unwrap(), only);
        assert_eq!(feasible_degrees(5).unwrap(), only);
        assert_eq!(feasible_degrees(2), Err(SilhouetteError::OutOfScope(2)));
    }

    #[test]
    fn modulus_growth_examples() {
        let l2 = 2f64.ln();
        let m = modulus_growth(2.0 * l2, &[2, 2, 2]).unwrap();
        assert_eq!(m, vec![2.0 * l2, 4.0 * l2, 8.0 * l2, 16.0 * l2]);
        assert_eq!(modulus_growth(1.5, &[1, 1, 1]).unwrap(), vec![1.5; 4]);
        assert!(modulus_growth(0.0, &[2]).is_err());
    }

    #[test]
    fn eventual_examples() {
        let e = eventual_connectivity(&sig(&[2; 8])).unwrap();
        assert_eq!((e.k, e.from), (Finite(2), 0));
        let e = eventual_connectivity(&sig(&[5, 3, 2, 2, 2, 2, 2, 2])).unwrap();
        assert_eq!((e.k, e.from), (Finite(2), 2));
        assert_eq!(
            eventual_connectivity(&sig(&[2; 7])),
            Err(SilhouetteError::InsufficientData { have: 7, need: 8 })
        );
    }

    #[test]
    fn period_four_pattern() {
        let pattern = [
            (Finite(1), false),
            (Finite(2), true),
            (Finite(1), true),
            (Finite(1), false),
        ];
        let s = ConnectivitySignature::periodic("model", &pattern, 16);
        match eventual_connectivity(&s) {
            Err(SilhouetteError::NoEventualConnectivity { period, bounded }) => {
                assert_eq!(period, Some(4));
                assert_eq!(
                    bounded,
                    BoundednessPattern::Periodic {
                        pattern: vec![false, true, true, false]
                    }
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn periodic_suffix_prefers_short_period() {
        assert_eq!(periodic_suffix(&[1, 1, 1, 1]), Some((1, 0)));
        assert_eq!(periodic_suffix(&[9, 1, 2, 1, 2, 1, 2]), Some((2, 1)));
        assert_eq!(periodic_suffix(&[1, 2, 3, 4, 5]), None);
    }

    #[test]
    fn classification_rows() {
        let v = classify_silhouette(&sig(&[4; 8]), None, false).unwrap();
        assert_eq!(v.class, DynamicsClass::EventuallyIsometric);

        let moduli = modulus_growth(0.7, &[2; 7]).unwrap();
        let v = classify_silhouette(&sig(&[2; 8]), Some(&moduli), false).unwrap();
        assert_eq!(v.class, DynamicsClass::Trimodal);
        assert!(v.contracting_lamination.is_some() && v.isometric_lamination.is_some());

        let v = classify_silhouette(&sig(&[2; 8]), Some(&[0.7; 8]), false).unwrap();
        assert_eq!(v.class, DynamicsClass::EventuallyIsometric);

        let mut baker = sig(&[2; 8]);
        baker.entries[0].connectivity = Infinite;
        let v = classify_silhouette(&baker, None, true).unwrap();
        assert_eq!(v.class, DynamicsClass::Bimodal);
        assert!(v.contracting_lamination.is_some() && v.isometric_lamination.is_none());

        let v = classify_silhouette(&sig(&[3; 8]), None, true).unwrap();
        assert_eq!(v.class, DynamicsClass::Trimodal);

        assert!(matches!(
            classify_silhouette(&sig(&[2; 8]), None, false),
            Err(SilhouetteError::Unclassifiable(_))
        ));
    }

    #[test]
    fn connectivity_json() {
        assert_eq!(serde_json::to_string(&Infinite).unwrap(), "\"inf\"");
        assert_eq!(
            serde_json::from_str::<Connectivity>("7").unwrap(),
            Finite(7)
        );
        assert_eq!(
            serde_json::from_str::<Connectivity>("\"inf\"").unwrap(),
            Infinite
        );
        let line = classify_silhouette(&sig(&[4; 8]), None, false)
            .unwrap()
            .to_json_line();
        assert!(!line.contains('\n') && line.contains("EventuallyIsometric"));
    }
}
