//! Plain-text complex matrices.
//!
//! The first non-comment line holds `rows cols`. Each following line holds
//! one row as `re im` pairs separated by whitespace. Text after `#` is
//! ignored, as are blank lines.

use std::path::Path;

use fluxindex::linalg::{validate_projection, ComplexMatrix};
use fluxindex::{c64, Projection};

use crate::error::CliError;

/// Tolerance on `||P* - P||` and `||P^2 - P||` for projections read from disk.
pub const PROJECTION_TOL: f64 = 1e-8;

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines.next().ok_or("empty matrix file")?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("line {ln}: bad header: {e}"))?;
    let [rows, cols] = dims[..] else {
        return Err(format!("line {ln}: header must be `rows cols`"));
    };
    let mut entries = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (ln, line) in lines {
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("line {ln}: {e}"))?;
        if values.len() != 2 * cols {
            return Err(format!(
                "line {ln}: expected {} numbers ({cols} re/im pairs), found {}",
                2 * cols,
                values.len()
            ));
        }
        entries.extend(values.chunks(2).map(|p| c64::new(p[0], p[1])));
        seen += 1;
    }
    if seen != rows {
        return Err(format!("expected {rows} rows, found {seen}"));
    }
    ComplexMatrix::from_row_major(rows, cols, &entries).map_err(|e| e.to_string())
}

pub fn read_projection(path: &Path) -> Result<Projection, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let m = parse_matrix(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    validate_projection(&m, PROJECTION_TOL)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Inverse of [`parse_matrix`].
#[cfg(test)]
fn format_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| {
                let z = m.get(i, j);
                format!("{:e} {:e}", z.re, z.im)
            })
            .collect();
        out.push_str(&row.join("  "));
        out.push('\n');
    }
    out
}
