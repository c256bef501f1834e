//! Distance from an orbit to the boundary of the filled-in domains, with the
//! empirical case call, for three synthetic systems.
//!
//! Run with `cargo run --example boundary_probe`.

use num_complex::Complex64;
use wandering::boundary::{
    convergence_class, delta_sequence, shadowing_check, SyntheticSystem, SystemFamily,
    DEFAULT_THRESHOLD,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let families = [
        (SystemFamily::Tower { r: 2.0, degree: 2 }, 9),
        (SystemFamily::DiskApproach, 40),
        (SystemFamily::DiskAlternating, 40),
    ];
    for (family, stages) in families {
        let system = SyntheticSystem::new(family)?;
        let trace = delta_sequence(&system, system.marked_point(), stages)?;
        let call = convergence_class(&trace, DEFAULT_THRESHOLD)?;
        let last = trace.entries.last().expect("non-empty trace");
        println!(
            "{family:?}: case {:?}, final delta {:.3e} at n = {}",
            call.case, last.delta, last.n
        );
    }
    let disk = SyntheticSystem::new(SystemFamily::DiskApproach)?;
    let rep = shadowing_check(
        &disk,
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        30,
    )?;
    println!("disk shadowing factor 2C e^(2C) = {:.4}", rep.factor);
    Ok(())
}
