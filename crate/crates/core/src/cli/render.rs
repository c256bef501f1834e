use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;
use std::path::Path;

use super::CliError;
use crate::hypgeo::{gudermannian, inverse_gudermannian};

const CANVAS: f64 = 480.0;
// Outermost leaf sits at this fraction of the strip half-height.
const VISIBLE_HEIGHT: f64 = 0.95;

/// Radii of `n` circles of `A(R)` equally spaced in the height
/// `G(π log ρ/(2 log R))` and symmetric about the unit circle.
pub fn leaf_radii(r: f64, n: usize) -> Vec<f64> {
    let top = inverse_gudermannian(VISIBLE_HEIGHT * FRAC_PI_2);
    (0..n)
        .map(|k| {
            let h = top * (2.0 * (k + 1) as f64 / (n + 1) as f64 - 1.0);
            (2.0 * r.ln() * gudermannian(h) / PI).exp()
        })
        .collect()
}

/// SVG of `A(R)` with `circles` contracting leaves in red and `rays` isometric leaves in blue.
pub fn foliation_svg(r: f64, circles: usize, rays: usize) -> Result<String, CliError> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(CliError::Config(format!("R > 1 must hold (got {r})")));
    }
    let scale = 0.45 * CANVAS / r;
    let c = CANVAS / 2.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    );
    let _ = writeln!(s, "<!-- wandering {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        r#"<rect width="{CANVAS}" height="{CANVAS}" fill="white"/>"#
    );
    for rho in [r, 1.0 / r] {
        let _ = writeln!(
            s,
            r#"<circle class="boundary" cx="{c}" cy="{c}" r="{:.6}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            rho * scale
        );
    }
    for rho in leaf_radii(r, circles) {
        let _ = writeln!(
            s,
            r#"<circle class="contracting" cx="{c}" cy="{c}" r="{:.6}" fill="none" stroke="red" stroke-width="1"/>"#,
            rho * scale
        );
    }
    for j in 0..rays {
        let (sin, cos) = (TAU * j as f64 / rays as f64).sin_cos();
        let (a, b) = (scale / r, scale * r);
        let _ = writeln!(
            s,
            r#"<line class="isometric" x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="blue" stroke-width="1"/>"#,
            c + a * cos,
            c - a * sin,
            c + b * cos,
            c - b * sin
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render_foliation(r: f64, circles: usize, rays: usize, out: &Path) -> Result<(), CliError> {
    let svg = foliation_svg(r, circles, rays)?;
    if let Some(dir) = out.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(out, svg).map_err(|e| CliError::io(out, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn leaf_counts() {
        let svg = foliation_svg(E, 7, 12).unwrap();
        assert_eq!(svg.matches(r#"stroke="red""#).count(), 7);
        assert_eq!(svg.matches("<line").count(), 12);
        assert_eq!(svg.matches(r#"stroke="blue""#).count(), 12);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn thin_annulus_still_renders() {
        let svg = foliation_svg(1.0001, 3, 4).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("</svg>"));
        assert!(foliation_svg(1.0, 3, 4).is_err());
    }

    #[test]
    fn radii_are_uniform_in_height() {
        let r = E;
        let radii = leaf_radii(r, 7);
        let h: Vec<f64> = radii
            .iter()
            .map(|rho| inverse_gudermannian(PI * rho.ln() / (2.0 * r.ln())))
            .collect();
        let step = h[1] - h[0];
        for w in h.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-12);
        }
        assert!((h[3]).abs() < 1e-12);
        assert!(radii.iter().all(|&rho| 1.0 / r < rho && rho < r));
    }
}
