//! Writes an SVG of `A(e)` with its contracting circles and isometric rays.
//!
//! Run with `cargo run --example foliation_svg -- [output.svg]`.

use std::f64::consts::E;
use std::path::PathBuf;

use wandering::cli::{leaf_radii, render_foliation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("foliation.svg"));
    render_foliation(E, 7, 12, &out)?;
    let radii: Vec<String> = leaf_radii(E, 7).iter().map(|r| format!("{r:.4}")).collect();
    println!(
        "wrote {} with circle radii {}",
        out.display(),
        radii.join(", ")
    );
    Ok(())
}
