//! Closed-form hyperbolic distances on the canonical domains, cross-checked
//! against the quadrature length of the geodesic joining the points.
//!
//! Run with `cargo run --example hyperbolic_distance`.

use std::f64::consts::E;

use num_complex::Complex64;
use wandering::hypgeo::{
    circle_polyline, core_geodesic_length, distance, path_length, CanonicalDomain, Geodesic,
    PolylinePath, QUADRATURE_TOL,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        (
            CanonicalDomain::UnitDisk,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
        ),
        (
            CanonicalDomain::RightHalfPlane,
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 3.0),
        ),
        (
            CanonicalDomain::HorizontalStrip,
            Complex64::new(-1.0, 0.4),
            Complex64::new(2.0, -1.2),
        ),
        (
            CanonicalDomain::annulus(E * E)?,
            Complex64::new(1.0, 0.0),
            Complex64::new(-0.5, 2.0),
        ),
    ];
    println!(
        "{:<18} {:>14} {:>14} {:>10}",
        "domain", "closed form", "quadrature", "|diff|"
    );
    for (dom, z, w) in cases {
        let d = distance(dom, z, w)?;
        let q = Geodesic::between(dom, z, w)?.length(QUADRATURE_TOL)?;
        let name = format!("{dom:?}")
            .split('(')
            .next()
            .unwrap_or_default()
            .to_string();
        println!("{name:<18} {d:>14.10} {q:>14.10} {:>10.1e}", (d - q).abs());
    }

    for r in [1.5, E, 5.0] {
        let dom = CanonicalDomain::annulus(r)?;
        let circle = PolylinePath::new(circle_polyline(1.0, 4096), dom)?;
        println!(
            "A({r:.4}): unit circle length {:.8}, core geodesic {:.8}",
            path_length(&circle)?,
            core_geodesic_length(r, 1)?
        );
    }
    Ok(())
}
