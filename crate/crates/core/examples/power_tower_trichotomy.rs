//! Distance traces under the power tower `z ↦ z²` on `A(2)`: a pair on one
//! circle (contracting), one on a ray (isometric), a generic pair (decreasing
//! to a positive limit) and a generic pair whose images come to share a ray.
//!
//! Run with `cargo run --example power_tower_trichotomy`.

use std::f64::consts::FRAC_PI_2;

use wandering::hypgeo::LogPolarPoint;
use wandering::tower::{trichotomy_report, PowerTower, DEEP_STAGE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tower = PowerTower::constant(2.0, 2, DEEP_STAGE)?;
    let pairs = [
        (
            "same circle",
            LogPolarPoint::from_polar(1.5, 0.0),
            LogPolarPoint::from_polar(1.5, 1.0),
        ),
        (
            "same ray",
            LogPolarPoint::from_polar(1.2, 1.0),
            LogPolarPoint::from_polar(1.7, 1.0),
        ),
        (
            "generic",
            LogPolarPoint::from_polar(1.5, 0.3),
            LogPolarPoint::from_polar(1.2, 2.0),
        ),
        (
            "quarter-turn gap",
            LogPolarPoint::from_polar(1.5, 0.0),
            LogPolarPoint::from_polar(1.2, FRAC_PI_2),
        ),
    ];
    for (label, z, w) in pairs {
        let rep = trichotomy_report(&tower, z, w, 20)?;
        match rep.rays_merge_at {
            Some(k) => println!(
                "{label}: {:?} (images share a ray from stage {k})",
                rep.verdict
            ),
            None => println!("{label}: {:?}", rep.verdict),
        }
        for e in rep.trace.entries.iter().step_by(4) {
            println!(
                "  n = {:>2}  D_n = {:>8}  d_n = {:.6e}",
                e.n, e.cumulative, e.distance
            );
        }
        println!(
            "  limit c(z, w) = {:.12}, exact d at stage {DEEP_STAGE} = {:.12}",
            rep.limit, rep.deep_stage_distance
        );
    }
    Ok(())
}
