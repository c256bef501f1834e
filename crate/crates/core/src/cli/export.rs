use std::path::Path;

use num_complex::Complex64;

use super::CliError;
use crate::boundary::BoundaryTrace;
use crate::tower::DistanceTrace;

/// `{:.16e}`: 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| CliError::io(path, e))?;
    w.write_record(header).map_err(|e| CliError::io(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Columns `n,Dn,dn,bound`; `Dn` is the exact cumulative degree.
pub fn export_distance_trace(trace: &DistanceTrace, path: &Path) -> Result<(), CliError> {
    write_rows(
        path,
        &["n", "Dn", "dn", "bound"],
        trace.entries.iter().map(|e| {
            vec![
                e.n.to_string(),
                e.cumulative.clone(),
                fmt_f64(e.distance),
                fmt_f64(e.bound),
            ]
        }),
    )
}

/// Columns `n,delta,wx,wy`.
pub fn export_boundary_trace(trace: &BoundaryTrace, path: &Path) -> Result<(), CliError> {
    write_rows(
        path,
        &["n", "delta", "wx", "wy"],
        trace.entries.iter().map(|e| {
            vec![
                e.n.to_string(),
                fmt_f64(e.delta),
                fmt_f64(e.witness.re),
                fmt_f64(e.witness.im),
            ]
        }),
    )
}

/// Columns `x,y`.
pub fn export_points(points: &[Complex64], path: &Path) -> Result<(), CliError> {
    write_rows(
        path,
        &["x", "y"],
        points.iter().map(|z| vec![fmt_f64(z.re), fmt_f64(z.im)]),
    )
}

/// Arbitrary table with a caller-chosen header.
pub fn export_table(header: &[&str], rows: Vec<Vec<String>>, path: &Path) -> Result<(), CliError> {
    write_rows(path, header, rows)
}
