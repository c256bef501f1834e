//! The connectivity-to-dynamics decision table, plus eventual connectivity
//! of a periodic signature.
//!
//! Run with `cargo run --example silhouette_table`.

use wandering::silhouette::{
    classify_silhouette, eventual_connectivity, feasible_degrees, modulus_growth, Connectivity,
    ConnectivitySignature,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for k in [3, 5, 50] {
        println!(
            "k = {k}: feasible (degree, critical points) = {:?}",
            feasible_degrees(k)?
        );
    }
    let constant = |k: Connectivity| ConnectivitySignature::periodic("constant", &[(k, true)], 16);
    let growing = modulus_growth(2.0 * 2f64.ln(), &[2; 15])?;
    let flat = vec![1.5; 16];
    let rows: [(&str, ConnectivitySignature, Option<&[f64]>, bool); 5] = [
        ("k = 4", constant(Connectivity::Finite(4)), None, false),
        (
            "k = 2, constant modulus",
            constant(Connectivity::Finite(2)),
            Some(&flat),
            false,
        ),
        (
            "k = 2, growing modulus",
            constant(Connectivity::Finite(2)),
            Some(&growing),
            false,
        ),
        (
            "Baker, finite",
            constant(Connectivity::Finite(2)),
            None,
            true,
        ),
        (
            "Baker, infinite",
            constant(Connectivity::Infinite),
            None,
            true,
        ),
    ];
    for (label, sig, moduli, baker) in rows {
        let v = classify_silhouette(&sig, moduli, baker)?;
        println!("{label:<26} -> {:?}", v.class);
    }

    let pattern = [
        (Connectivity::Finite(1), false),
        (Connectivity::Finite(2), true),
        (Connectivity::Finite(1), true),
        (Connectivity::Finite(1), false),
    ];
    let sig = ConnectivitySignature::periodic("four-stage cycle", &pattern, 16);
    match eventual_connectivity(&sig) {
        Ok(ev) => println!("eventual connectivity {:?}", ev.k),
        Err(e) => println!("four-stage cycle: {e}"),
    }
    Ok(())
}
