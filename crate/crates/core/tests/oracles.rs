//! Closed forms checked against independent computations: quadrature,
//! brute-force search and hand-written lifts.

use std::collections::BTreeSet;
use std::f64::consts::{E, FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wandering::boundary::{
    delta_sequence, harnack_check, shadowing_check, SyntheticSystem, SystemFamily,
};
use wandering::hypgeo::{
    circle_polyline, core_geodesic_length, curve_length, density, distance, path_length,
    strip_distance, CanonicalDomain, Geodesic, LogPolarPoint, PolylinePath, QUADRATURE_TOL,
};
use wandering::modelmap::{phi, winding_number, SampledCurve};
use wandering::silhouette::{
    feasible_degrees, modulus_growth, riemann_hurwitz, Connectivity, RHInstance,
};
use wandering::tower::{
    circle_collapse_bound, limit_distance, pair_distance, pair_distance_with_threshold, PowerTower,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn segment(a: Complex64, b: Complex64, dom: CanonicalDomain) -> PolylinePath {
    PolylinePath::new(vec![a, b], dom).unwrap()
}

#[test]
fn radial_distances_match_quadrature() {
    let disk = distance(CanonicalDomain::UnitDisk, c(0.0, 0.0), c(0.5, 0.0)).unwrap();
    assert!((disk - 3f64.ln()).abs() < 1e-14);
    let quad = path_length(&segment(
        c(0.0, 0.0),
        c(0.5, 0.0),
        CanonicalDomain::UnitDisk,
    ))
    .unwrap();
    assert!((quad - disk).abs() < 1e-8);

    let hp = CanonicalDomain::RightHalfPlane;
    let d = distance(hp, c(1.0, 0.0), c(2.0, 0.0)).unwrap();
    assert!((d - 2f64.ln()).abs() < 1e-14);
    assert!((path_length(&segment(c(1.0, 0.0), c(2.0, 0.0), hp)).unwrap() - d).abs() < 1e-8);

    let ann = CanonicalDomain::annulus(E * E).unwrap();
    let d = distance(ann, c(1.0, 0.0), c(E, 0.0)).unwrap();
    assert!((d - (3.0 * PI / 8.0).tan().ln()).abs() < 1e-12);
    assert!((path_length(&segment(c(1.0, 0.0), c(E, 0.0), ann)).unwrap() - d).abs() < 1e-8);
}

#[test]
fn geodesic_quadrature_matches_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let domains = [
        CanonicalDomain::UnitDisk,
        CanonicalDomain::RightHalfPlane,
        CanonicalDomain::HorizontalStrip,
        CanonicalDomain::annulus(3.0).unwrap(),
    ];
    for dom in domains {
        for _ in 0..40 {
            let mut pick = || match dom {
                CanonicalDomain::UnitDisk => {
                    Complex64::from_polar(0.9 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))
                }
                CanonicalDomain::RightHalfPlane => {
                    c(rng.gen_range(0.1..4.0), rng.gen_range(-4.0..4.0))
                }
                CanonicalDomain::HorizontalStrip => {
                    c(rng.gen_range(-3.0..3.0), rng.gen_range(-1.3..1.3))
                }
                CanonicalDomain::Annulus(a) => Complex64::from_polar(
                    (0.9 * a.log_radius() * rng.gen_range(-1.0..1.0)).exp(),
                    rng.gen_range(0.0..TAU),
                ),
            };
            let (z, w) = (pick(), pick());
            let d = distance(dom, z, w).unwrap();
            let quad = Geodesic::between(dom, z, w)
                .unwrap()
                .length(QUADRATURE_TOL)
                .unwrap();
            assert!((d - quad).abs() < 1e-7, "{dom:?} {z} {w}: {d} vs {quad}");
        }
    }
}

#[test]
fn strip_distance_is_the_half_plane_distance_of_the_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-1.5..1.5));
        let w = c(rng.gen_range(-3.0..3.0), rng.gen_range(-1.5..1.5));
        let strip = distance(CanonicalDomain::HorizontalStrip, z, w).unwrap();
        let hp = distance(CanonicalDomain::RightHalfPlane, z.exp(), w.exp()).unwrap();
        assert!(
            (strip - hp).abs() < 1e-9 * strip.max(1.0),
            "{z} {w}: {strip} vs {hp}"
        );
    }
}

#[test]
fn disk_distance_is_the_half_plane_distance_of_the_cayley_image() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let one = c(1.0, 0.0);
    for _ in 0..200 {
        let z = Complex64::from_polar(0.95 * rng.gen::<f64>(), rng.gen_range(0.0..TAU));
        let w = Complex64::from_polar(0.95 * rng.gen::<f64>(), rng.gen_range(0.0..TAU));
        let disk = distance(CanonicalDomain::UnitDisk, z, w).unwrap();
        let hp = distance(
            CanonicalDomain::RightHalfPlane,
            (one + z) / (one - z),
            (one + w) / (one - w),
        )
        .unwrap();
        assert!(
            (disk - hp).abs() < 1e-10 * disk.max(1.0),
            "{z} {w}: {disk} vs {hp}"
        );
    }
}

/// Hand-written lift and a wide brute-force search over deck translates.
fn brute_force_annulus_distance(r: f64, z: Complex64, w: Complex64) -> f64 {
    let k = PI / (2.0 * r.ln());
    let lift = |p: Complex64| c(k * p.arg(), k * p.norm().ln());
    let (a, b) = (lift(z), lift(w));
    let spacing = PI * PI / r.ln();
    (-20..=20)
        .map(|j| strip_distance(a.re - b.re + j as f64 * spacing, a.im, b.im))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn annulus_distance_matches_brute_force_deck_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for r in [1.2, 1.5, E, 5.0, 40.0] {
        let dom = CanonicalDomain::annulus(r).unwrap();
        for _ in 0..100 {
            let mut pick = || {
                Complex64::from_polar(
                    (0.95 * r.ln() * rng.gen_range(-1.0..1.0)).exp(),
                    rng.gen_range(0.0..TAU),
                )
            };
            let (z, w) = (pick(), pick());
            let d = distance(dom, z, w).unwrap();
            let brute = brute_force_annulus_distance(r, z, w);
            assert!(
                (d - brute).abs() < 1e-10 * d.max(1.0),
                "R = {r}, {z}, {w}: {d} vs {brute}"
            );
        }
    }
}

#[test]
fn density_at_the_core_and_core_length() {
    let ann = CanonicalDomain::annulus(E).unwrap();
    assert!((density(ann, c(1.0, 0.0)).unwrap() - FRAC_PI_2).abs() < 1e-15);
    assert!((TAU * FRAC_PI_2 - core_geodesic_length(E, 1).unwrap()).abs() < 1e-12);
    let poly = PolylinePath::new(
        circle_polyline(1.0, 4096),
        CanonicalDomain::annulus(E * E).unwrap(),
    )
    .unwrap();
    assert!((path_length(&poly).unwrap() - PI * PI / 2.0).abs() < 1e-4);
}

#[test]
fn circle_collapse_bound_is_the_circle_length_over_the_degree() {
    let tower = PowerTower::constant(2.0, 2, 10).unwrap();
    let ann = CanonicalDomain::annulus(2.0).unwrap();
    for r in [0.6, 1.0, 1.5, 1.9] {
        let circle = |t: f64| {
            (
                Complex64::from_polar(r, TAU * t),
                c(0.0, TAU) * Complex64::from_polar(r, TAU * t),
            )
        };
        let len = curve_length(ann, circle, 1e-12).unwrap();
        for n in 0..=10 {
            let bound = circle_collapse_bound(&tower, r, n).unwrap();
            let want = len / 2f64.powi(n as i32);
            assert!(
                (bound - want).abs() < 1e-9 * want,
                "r = {r}, n = {n}: {bound} vs {want}"
            );
        }
    }
    let e_tower = PowerTower::constant(E, 2, 3).unwrap();
    assert!((circle_collapse_bound(&e_tower, 1.0, 3).unwrap() - PI * PI / 8.0).abs() < 1e-12);
}

#[test]
fn limit_distance_is_the_vertical_secant_integral() {
    let tower = PowerTower::constant(2.0, 2, 40).unwrap();
    let strip = CanonicalDomain::HorizontalStrip;
    let k = tower.annulus().lift_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..50 {
        let z = LogPolarPoint::new(
            0.9 * tower.log_radius() * rng.gen_range(-1.0..1.0),
            rng.gen_range(0.0..TAU),
        );
        let w = LogPolarPoint::new(
            0.9 * tower.log_radius() * rng.gen_range(-1.0..1.0),
            rng.gen_range(0.0..TAU),
        );
        let (yz, yw) = (k * z.u, k * w.u);
        let vertical = |t: f64| (c(0.0, yw + (yz - yw) * t), c(0.0, yz - yw));
        let oracle = curve_length(strip, vertical, 1e-13).unwrap();
        let limit = limit_distance(&tower, z, w).unwrap();
        assert!((limit - oracle).abs() < 1e-10, "{limit} vs {oracle}");
        let deep = pair_distance_with_threshold(&tower, z, w, 40, f64::INFINITY).unwrap();
        assert!(!deep.asymptotic);
        assert!(
            (deep.value - limit).abs() < 1e-6,
            "{} vs {limit}",
            deep.value
        );
    }
}

#[test]
fn generic_reference_pair_limit() {
    let tower = PowerTower::constant(2.0, 2, 40).unwrap();
    let z = LogPolarPoint::from_polar(1.5, 0.0);
    let w = LogPolarPoint::from_polar(1.2, FRAC_PI_2);
    let v = limit_distance(&tower, z, w).unwrap();
    let d0 = distance(
        CanonicalDomain::annulus(2.0).unwrap(),
        z.to_complex(),
        w.to_complex(),
    )
    .unwrap();
    assert!(0.0 < v && v < d0);
    assert!((pair_distance(&tower, z, w, 0).unwrap().value - d0).abs() < 1e-12);
    let deep = pair_distance_with_threshold(&tower, z, w, 40, f64::INFINITY)
        .unwrap()
        .value;
    assert!((deep - v).abs() < 1e-6);
}

#[test]
fn feasible_degrees_match_exhaustive_search() {
    for k in 3u64..=50 {
        let brute: BTreeSet<(u64, u64)> = (1u64..=100)
            .flat_map(|m| (0u64..=100).map(move |d| (m, d)))
            .filter(|&(m, d)| k - 2 == m * (k - 2) + d)
            .collect();
        assert_eq!(feasible_degrees(k).unwrap(), brute, "k = {k}");
    }
}

#[test]
fn riemann_hurwitz_reference_values() {
    let rh = |c_v, n, delta| {
        riemann_hurwitz(RHInstance {
            c_v: Connectivity::Finite(c_v),
            degree: Connectivity::Finite(n),
            delta,
        })
        .unwrap()
    };
    assert_eq!(rh(2, 3, 0), Connectivity::Finite(2));
    assert_eq!(rh(1, 2, 1), Connectivity::Finite(1));
    assert_eq!(rh(3, 2, 0), Connectivity::Finite(4));
}

#[test]
fn modulus_growth_is_multiplicative() {
    let m0 = 2.0 * 2f64.ln();
    let got = modulus_growth(m0, &[2, 2, 2]).unwrap();
    let want = [m0, 2.0 * m0, 4.0 * m0, 8.0 * m0];
    assert_eq!(got, want);
    let degrees = [3u64, 1, 2, 5, 2];
    let got = modulus_growth(1.0, &degrees).unwrap();
    let mut d = 1u64;
    for (n, m) in got.iter().enumerate() {
        assert_eq!(*m, d as f64);
        if n < degrees.len() {
            d *= degrees[n];
        }
    }
}

#[test]
fn harnack_reference_ratios() {
    let disk = harnack_check(CanonicalDomain::UnitDisk, c(0.0, 0.0), c(0.5, 0.0)).unwrap();
    assert!((disk.ratio - 0.75).abs() < 1e-15);
    assert!((disk.lower - 1.0 / 9.0).abs() < 1e-14 && (disk.upper - 9.0).abs() < 1e-13);
    let hp = harnack_check(CanonicalDomain::RightHalfPlane, c(1.0, 0.0), c(2.0, 0.0)).unwrap();
    assert!((hp.ratio - 2.0).abs() < 1e-15 && (hp.upper - 4.0).abs() < 1e-13);
    let same = harnack_check(CanonicalDomain::HorizontalStrip, c(0.3, 0.2), c(0.3, 0.2)).unwrap();
    assert!(same.holds && same.ratio == 1.0);
}

#[test]
fn disk_shadowing_factor_is_closed_form() {
    let system = SyntheticSystem::new(SystemFamily::DiskApproach).unwrap();
    let rep = shadowing_check(&system, c(0.0, 0.0), c(0.5, 0.0), 30).unwrap();
    assert!((rep.c - 3f64.ln()).abs() < 1e-14);
    assert!((rep.factor - 18.0 * 3f64.ln()).abs() < 1e-12);
}

#[test]
fn tower_boundary_distance_is_closed_form() {
    let system = SyntheticSystem::new(SystemFamily::Tower { r: 2.0, degree: 2 }).unwrap();
    let z0 = Complex64::from_polar(1.3, 0.4);
    let trace = delta_sequence(&system, z0, 6).unwrap();
    for e in &trace.entries {
        let dn = (1u64 << e.n) as f64;
        let want = 2f64.powf(dn) - 1.3f64.powf(dn);
        assert!(
            (e.delta - want).abs() <= 1e-12 * want,
            "n = {}: {} vs {want}",
            e.n,
            e.delta
        );
    }
}

#[test]
fn argument_principle_reference_windings() {
    let origin = c(0.0, 0.0);
    let unit = SampledCurve::circle(origin, 1.0, 4096);
    assert_eq!(
        winding_number(|z: Complex64| z * z * z, &unit, origin).unwrap(),
        3
    );
    assert_eq!(
        winding_number(phi, &SampledCurve::circle(origin, 3.0, 8192), origin).unwrap(),
        -1
    );
    assert_eq!(
        winding_number(phi, &SampledCurve::circle(origin, 0.5, 4096), origin).unwrap(),
        1
    );
}
