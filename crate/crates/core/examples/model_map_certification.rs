//! Builds the model-map parameters for `r = 2.5`, `ε = 10⁻³`, certifies
//! containment stage by stage and prints the connectivity audit.
//!
//! Run with `cargo run --release --example model_map_certification`.

use wandering::modelmap::{generate_params, ModelLab};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = generate_params(2.5, 1e-3, 1.0)?;
    println!(
        "lambda = {:.6}, R = {:.6}, R' = {:.6}",
        params.lambda, params.big_r, params.rp
    );
    let lab = ModelLab::new(params)?;
    for n in 0..lab.params().stages() {
        let rep = lab.verify_containment(n, 10_000)?;
        println!(
            "stage {n}: min clearance {:.6e}, certified {:.6e}, required {:.1e}",
            rep.min_clearance, rep.certified_clearance, rep.required
        );
    }
    let audit = lab.connectivity_audit(0)?;
    for s in &audit.stages {
        let kind = if s.topology.bounded {
            "bounded"
        } else {
            "unbounded"
        };
        println!(
            "U_{}: {kind}, connectivity {}",
            s.stage, s.topology.connectivity
        );
    }
    Ok(())
}
