//! Property tests for the structural invariants of each module.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wandering::boundary::{
    convergence_class, delta_sequence, harnack_check, shadowing_check, BoundaryCase, BoundaryError,
    BoundaryTrace, PlaneRegion, SyntheticSystem, SystemFamily,
};
use wandering::hypgeo::{density, distance, distance_with_window, CanonicalDomain, LogPolarPoint};
use wandering::modelmap::{winding_number, SampledCurve};
use wandering::silhouette::{
    classify_silhouette, feasible_degrees, riemann_hurwitz, Connectivity, ConnectivitySignature,
    RHInstance, SignatureEntry,
};
use wandering::tower::{
    classify_pair, distance_trace, h_at_stage, h_value, iterate, iterate_point, mediating_point,
    pair_distance, PairKind, PowerTower, TowerError, TowerPoint,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn disk_point() -> impl Strategy<Value = Complex64> {
    (0.0..0.99f64, 0.0..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn half_plane_point() -> impl Strategy<Value = Complex64> {
    (0.01..20.0f64, -20.0..20.0f64).prop_map(|(x, y)| c(x, y))
}

fn strip_point() -> impl Strategy<Value = Complex64> {
    (-10.0..10.0f64, -1.5..1.5f64).prop_map(|(x, y)| c(x, y))
}

fn annulus_radius() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(1.5),
        Just(std::f64::consts::E),
        Just(5.0),
        1.1..10.0f64
    ]
}

/// A point of `A(R)` with `|log|z|| ≤ 0.8 log R`.
fn annulus_point(r: f64) -> impl Strategy<Value = Complex64> {
    (-0.8..0.8f64, 0.0..TAU).prop_map(move |(s, t)| Complex64::from_polar((s * r.ln()).exp(), t))
}

fn domain_and_triple() -> impl Strategy<Value = (CanonicalDomain, Complex64, Complex64, Complex64)>
{
    prop_oneof![
        (disk_point(), disk_point(), disk_point()).prop_map(|(a, b, d)| (
            CanonicalDomain::UnitDisk,
            a,
            b,
            d
        )),
        (half_plane_point(), half_plane_point(), half_plane_point()).prop_map(|(a, b, d)| (
            CanonicalDomain::RightHalfPlane,
            a,
            b,
            d
        )),
        (strip_point(), strip_point(), strip_point()).prop_map(|(a, b, d)| (
            CanonicalDomain::HorizontalStrip,
            a,
            b,
            d
        )),
        annulus_radius().prop_flat_map(|r| {
            (annulus_point(r), annulus_point(r), annulus_point(r))
                .prop_map(move |(a, b, d)| (CanonicalDomain::annulus(r).unwrap(), a, b, d))
        }),
    ]
}

fn tower_pair(log_r: f64) -> impl Strategy<Value = (LogPolarPoint, LogPolarPoint)> {
    (-0.9..0.9f64, 0.0..TAU, -0.9..0.9f64, 0.0..TAU).prop_map(move |(a, s, b, t)| {
        (
            LogPolarPoint::new(a * log_r, s),
            LogPolarPoint::new(b * log_r, t),
        )
    })
}

fn finite(k: u64) -> SignatureEntry {
    SignatureEntry {
        connectivity: Connectivity::Finite(k),
        bounded: true,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn metric_is_symmetric_and_satisfies_triangle((dom, a, b, d) in domain_and_triple()) {
        let ab = distance(dom, a, b).unwrap();
        let ba = distance(dom, b, a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!(ab >= 0.0);
        let bd = distance(dom, b, d).unwrap();
        let ad = distance(dom, a, d).unwrap();
        prop_assert!(ad <= ab + bd + 1e-12, "{} > {} + {}", ad, ab, bd);
    }

    #[test]
    fn annulus_rotation_and_inversion_are_isometries(
        (r, z, w) in annulus_radius().prop_flat_map(|r| (Just(r), annulus_point(r), annulus_point(r))),
        alpha in 0.0..TAU,
    ) {
        let dom = CanonicalDomain::annulus(r).unwrap();
        let d = distance(dom, z, w).unwrap();
        let rot = Complex64::from_polar(1.0, alpha);
        let rotated = distance(dom, rot * z, rot * w).unwrap();
        let inverted = distance(dom, z.inv(), w.inv()).unwrap();
        prop_assert!((d - rotated).abs() <= 1e-12, "rotation: {} vs {}", d, rotated);
        prop_assert!((d - inverted).abs() <= 1e-12, "inversion: {} vs {}", d, inverted);
    }

    #[test]
    fn density_is_comparable_to_inverse_boundary_distance(z in disk_point(), s in strip_point()) {
        for (dom, p) in [(CanonicalDomain::UnitDisk, z), (CanonicalDomain::HorizontalStrip, s)] {
            let rho = density(dom, p).unwrap();
            let delta = dom.boundary_distance(p);
            prop_assert!(1.0 / (2.0 * delta) <= rho * (1.0 + 1e-12), "{:?} at {}: {} vs {}", dom, p, rho, delta);
            prop_assert!(rho <= 2.0 / delta * (1.0 + 1e-12), "{:?} at {}: {} vs {}", dom, p, rho, delta);
        }
    }

    #[test]
    fn harnack_bound_holds_on_simply_connected_domains((dom, a, b, _) in domain_and_triple()) {
        if dom.is_simply_connected() {
            prop_assert!(harnack_check(dom, a, b).unwrap().holds);
        } else {
            prop_assert!(harnack_check(dom, a, b).is_err());
        }
    }

    #[test]
    fn widening_the_deck_window_does_not_change_distance(
        (r, z, w) in annulus_radius().prop_flat_map(|r| (Just(r), annulus_point(r), annulus_point(r))),
        window in 2i64..12,
    ) {
        let dom = CanonicalDomain::annulus(r).unwrap();
        prop_assert_eq!(distance_with_window(dom, z, w, 1).unwrap(), distance_with_window(dom, z, w, window).unwrap());
    }

    #[test]
    fn stage_distances_never_increase(
        degrees in prop::collection::vec(2u64..5, 12),
        (z, w) in tower_pair(2f64.ln()),
    ) {
        let tower = PowerTower::new(2.0, degrees).unwrap();
        let trace = distance_trace(&tower, z, w, 12).unwrap();
        for p in trace.entries.windows(2) {
            prop_assert!(p[1].distance <= p[0].distance + 1e-12, "d_{} = {} > {}", p[1].n, p[1].distance, p[0].distance);
        }
    }

    #[test]
    fn pair_classes_are_exclusive_and_exhaustive(
        (z, w) in tower_pair(2f64.ln()),
        share_circle in any::<bool>(),
        share_ray in any::<bool>(),
    ) {
        let w = LogPolarPoint::new(
            if share_circle { z.u } else { w.u },
            if share_ray { z.theta } else { w.theta },
        );
        let class = classify_pair(z, w, 0.0);
        match (share_circle, share_ray) {
            (true, true) => prop_assert!(matches!(class, Err(TowerError::AmbiguousClassification(_)))),
            (true, false) => prop_assert_eq!(class.unwrap().kind, PairKind::SameCircle),
            (false, true) => prop_assert_eq!(class.unwrap().kind, PairKind::SameRay),
            (false, false) => prop_assert_eq!(class.unwrap().kind, PairKind::Generic),
        }
    }

    #[test]
    fn generic_distance_dominates_reverse_triangle((z, w) in tower_pair(2f64.ln()), n in 0usize..24) {
        let tower = PowerTower::constant(2.0, 2, 24).unwrap();
        let zs = mediating_point(z, w);
        let d = pair_distance(&tower, z, w, n).unwrap().value;
        let a = pair_distance(&tower, z, zs, n).unwrap().value;
        let b = pair_distance(&tower, zs, w, n).unwrap().value;
        prop_assert!(d >= (a - b).abs() - 1e-12, "d_{} = {} < |{} - {}|", n, d, a, b);
    }

    #[test]
    fn same_ray_pairs_keep_their_distance((z, w) in tower_pair(2f64.ln())) {
        let tower = PowerTower::constant(2.0, 2, 20).unwrap();
        let w = LogPolarPoint::new(w.u, z.theta);
        let trace = distance_trace(&tower, z, w, 20).unwrap();
        let d0 = trace.entries[0].distance;
        prop_assert!(trace.entries.iter().all(|e| (e.distance - d0).abs() < 1e-10));
    }

    #[test]
    fn h_is_stage_invariant((z, z0) in tower_pair(3f64.ln()), n in 0usize..30) {
        prop_assume!(z0.u != 0.0);
        let tower = PowerTower::constant(3.0, 3, 30).unwrap();
        let h = h_value(&tower, z, z0).unwrap();
        let at_n = h_at_stage(iterate(&tower, z, n).unwrap(), iterate(&tower, z0, n).unwrap()).unwrap();
        prop_assert_eq!(h.to_bits(), at_n.to_bits());
    }

    #[test]
    fn dyadic_collision_pairs_meet_exactly(nu in -0.9..0.9f64, turns in any::<u64>(), k in 1usize..40, j in 1u64..1000) {
        let tower = PowerTower::constant(2.0, 2, 40).unwrap();
        let step = 1u64 << (64 - k);
        let p = TowerPoint::from_turns(nu, turns);
        let q = TowerPoint::from_turns(nu, turns.wrapping_add(j.wrapping_mul(step)));
        prop_assert_eq!(iterate_point(&tower, p, k).unwrap(), iterate_point(&tower, q, k).unwrap());
    }

    #[test]
    fn riemann_hurwitz_is_the_affine_formula(c_v in 0u64..200, n in 1u64..50, delta in 0u64..200) {
        let c_u = n as i128 * (c_v as i128 - 2) + delta as i128 + 2;
        let got = riemann_hurwitz(RHInstance {
            c_v: Connectivity::Finite(c_v),
            degree: Connectivity::Finite(n),
            delta,
        });
        if c_u >= 1 {
            prop_assert_eq!(got.unwrap(), Connectivity::Finite(c_u as u64));
        } else {
            prop_assert!(got.is_err());
        }
    }

    #[test]
    fn feasible_degrees_reproduce_their_connectivity(k in 3u64..500) {
        for (m, delta) in feasible_degrees(k).unwrap() {
            let back = riemann_hurwitz(RHInstance {
                c_v: Connectivity::Finite(k),
                degree: Connectivity::Finite(m),
                delta,
            });
            prop_assert_eq!(back.unwrap(), Connectivity::Finite(k));
        }
    }

    #[test]
    fn silhouette_ignores_prepended_entries(
        k in 3u64..40,
        prefix in prop::collection::vec((1u64..60, any::<bool>()), 0..12),
    ) {
        let tail: Vec<SignatureEntry> = vec![finite(k); 10];
        let base = classify_silhouette(&ConnectivitySignature::new("tail", tail.clone()), None, false).unwrap();
        let mut entries: Vec<SignatureEntry> = prefix
            .iter()
            .map(|&(c, bounded)| SignatureEntry { connectivity: Connectivity::Finite(c), bounded })
            .collect();
        entries.extend(tail);
        let padded = classify_silhouette(&ConnectivitySignature::new("padded", entries), None, false).unwrap();
        prop_assert_eq!(base, padded);
    }

    #[test]
    fn trimodal_call_ignores_prepended_entries(prefix in prop::collection::vec(1u64..60, 0..12), mod0 in 0.1..5.0f64) {
        let len = prefix.len() + 10;
        let mut entries: Vec<SignatureEntry> = prefix.iter().map(|&c| finite(c)).collect();
        entries.extend(vec![finite(2); 10]);
        let moduli: Vec<f64> = (0..len).map(|n| mod0 * 2f64.powi(n as i32)).collect();
        let v = classify_silhouette(&ConnectivitySignature::new("padded", entries), Some(&moduli), false).unwrap();
        prop_assert_eq!(v.class, wandering::silhouette::DynamicsClass::Trimodal);
    }

    #[test]
    fn winding_counts_zeros_minus_poles(
        zeros in prop::collection::vec((0.0..2.0f64, 0.0..TAU), 0..4),
        poles in prop::collection::vec((0.0..2.0f64, 0.0..TAU), 0..4),
    ) {
        let pts = |v: &[(f64, f64)]| v.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect::<Vec<_>>();
        let (zs, ps) = (pts(&zeros), pts(&poles));
        // Keep every zero and pole clear of the unit circle so the count is well posed.
        prop_assume!(zs.iter().chain(&ps).all(|p| (p.norm() - 1.0).abs() > 0.05));
        let f = |z: Complex64| {
            let num: Complex64 = zs.iter().map(|a| z - a).product();
            let den: Complex64 = ps.iter().map(|b| z - b).product();
            num / den
        };
        let inside = |v: &[Complex64]| v.iter().filter(|p| p.norm() < 1.0).count() as i64;
        let curve = SampledCurve::circle(c(0.0, 0.0), 1.0, 4096);
        let k = winding_number(f, &curve, c(0.0, 0.0)).unwrap();
        prop_assert_eq!(k, inside(&zs) - inside(&ps));
        prop_assert_eq!(winding_number(f, &curve.refined(2), c(0.0, 0.0)).unwrap(), k);
    }

    #[test]
    fn concentric_disk_distances_are_ordered(a in 0.1..5.0f64, extra in 0.0..5.0f64, r in 0.0..1.0f64, t in 0.0..TAU) {
        let center = c(0.3, -0.7);
        let small = PlaneRegion::Disk { center, radius: a };
        let big = PlaneRegion::Disk { center, radius: a + extra };
        let z = center + Complex64::from_polar(r * a, t);
        prop_assert!(small.boundary_distance(z) <= big.boundary_distance(z));
    }

    #[test]
    fn convergence_call_is_stable_under_consistent_extension(
        body in prop::collection::vec(1e-3..1.0f64, 10..40),
        extra in prop::collection::vec(1e-3..1.0f64, 1..40),
        low in any::<bool>(),
    ) {
        let threshold = 1e-6;
        let scale = if low { 1e-9 } else { 1.0 };
        let mut deltas: Vec<f64> = body.iter().map(|d| d * scale).collect();
        let before = convergence_class(&BoundaryTrace::from_deltas(&deltas), threshold).unwrap().case;
        prop_assert_eq!(before, if low { BoundaryCase::C } else { BoundaryCase::A });
        deltas.extend(extra.iter().map(|d| d * scale));
        let after = convergence_class(&BoundaryTrace::from_deltas(&deltas), threshold).unwrap().case;
        prop_assert_eq!(before, after);
    }
}

fn families() -> [SystemFamily; 4] {
    [
        SystemFamily::DiskApproach,
        SystemFamily::DiskAlternating,
        SystemFamily::StripContraction,
        SystemFamily::Tower { r: 2.0, degree: 2 },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witnesses_realise_delta(seed in any::<u64>(), family in 0usize..4) {
        let system = SyntheticSystem::new(families()[family]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z0 = system.sample_point(&mut rng);
        let stages = if family == 3 { 9 } else { 30 };
        let trace = delta_sequence(&system, z0, stages).unwrap();
        for e in &trace.entries {
            prop_assert!(e.delta >= 0.0);
            // Tower stages reach |z| ~ 2^460, so the tolerance scales with delta there.
            let gap = ((e.point - e.witness).norm() - e.delta).abs();
            prop_assert!(gap <= 1e-9 * e.delta.max(1.0), "stage {}: {}", e.n, gap);
        }
    }

    #[test]
    fn shadowing_bound_is_never_violated(seed in any::<u64>(), family in 0usize..4) {
        let system = SyntheticSystem::new(families()[family]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (z0, z1) = (system.sample_point(&mut rng), system.sample_point(&mut rng));
        let stages = if family == 3 { 9 } else { 30 };
        match shadowing_check(&system, z0, z1, stages) {
            Ok(report) => prop_assert_eq!(report.entries.len(), stages + 1),
            Err(BoundaryError::BoundViolated { stage, lhs, rhs }) => {
                prop_assert!(false, "stage {}: {} > {}", stage, lhs, rhs);
            }
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}

#[test]
fn strip_boundary_distance_matches_height() {
    let dom = CanonicalDomain::HorizontalStrip;
    for y in [-1.5, -0.3, 0.0, 1.2] {
        assert!((dom.boundary_distance(c(4.0, y)) - (FRAC_PI_2 - f64::abs(y))).abs() < 1e-15);
    }
    assert!((dom.boundary_distance(c(0.0, 0.0)) - PI / 2.0).abs() < 1e-15);
}
