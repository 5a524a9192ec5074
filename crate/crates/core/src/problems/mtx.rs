//! Matrix Market coordinate (matrix) and array (right-hand side) files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{IrmError, Result};
use crate::linalg::SparseSpdMatrix;

/// Relative tolerance for accepting a `general` file as symmetric.
const SYMMETRY_TOL: f64 = 1e-12;

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| IrmError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| IrmError::io(path, e))
}

/// Splits off the banner and comment lines; returns the lowercase banner
/// tokens and the remaining data lines.
fn split_header<'a>(path: &Path, text: &'a str) -> Result<(Vec<String>, impl Iterator<Item = &'a str>)> {
    let mut lines = text.lines();
    let banner = lines
        .next()
        .ok_or_else(|| IrmError::format(path, "empty file"))?
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect::<Vec<_>>();
    if banner.first().map(String::as_str) != Some("%%matrixmarket") || banner.len() != 5 {
        return Err(IrmError::format(path, "missing %%MatrixMarket banner"));
    }
    if banner[1] != "matrix" {
        return Err(IrmError::format(path, format!("unsupported object '{}'", banner[1])));
    }
    let data = lines.map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('%'));
    Ok((banner, data))
}

fn parse_num<T: std::str::FromStr>(path: &Path, tok: Option<&str>, what: &str) -> Result<T> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| IrmError::format(path, format!("bad {what}")))
}

/// Reads a real `coordinate` file with `symmetric` or `general` storage.
pub fn read_matrix_market(path: &Path) -> Result<SparseSpdMatrix> {
    let text = read_text(path)?;
    let (banner, mut data) = split_header(path, &text)?;
    if banner[2] != "coordinate" {
        return Err(IrmError::format(path, "matrix must be in coordinate format"));
    }
    match banner[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(IrmError::format(path, format!("unsupported field '{other}'"))),
    }
    let symmetric = match banner[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(IrmError::format(path, format!("unsupported symmetry '{other}'"))),
    };
    let size = data.next().ok_or_else(|| IrmError::format(path, "missing size line"))?;
    let mut it = size.split_whitespace();
    let rows: usize = parse_num(path, it.next(), "row count")?;
    let cols: usize = parse_num(path, it.next(), "column count")?;
    let nnz: usize = parse_num(path, it.next(), "entry count")?;
    if rows != cols {
        return Err(IrmError::format(path, format!("matrix is {rows}x{cols}, not square")));
    }
    let n = rows;
    let mut entries = Vec::with_capacity(nnz);
    for line in data.by_ref().take(nnz) {
        let mut it = line.split_whitespace();
        let i: usize = parse_num(path, it.next(), "row index")?;
        let j: usize = parse_num(path, it.next(), "column index")?;
        let v: f64 = parse_num(path, it.next(), "value")?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(IrmError::format(path, format!("index ({i}, {j}) out of range")));
        }
        if symmetric && j > i {
            return Err(IrmError::format(path, "symmetric storage must hold the lower triangle"));
        }
        entries.push((i - 1, j - 1, v));
    }
    if entries.len() != nnz {
        return Err(IrmError::format(path, format!("expected {nnz} entries, found {}", entries.len())));
    }

    let mut triplets = Vec::with_capacity(2 * nnz);
    if symmetric {
        for &(i, j, v) in &entries {
            triplets.push((i, j, v));
            if i != j {
                triplets.push((j, i, v));
            }
        }
        return SparseSpdMatrix::from_triplets(n, &triplets);
    }
    // general storage: merge duplicates, then require a near-equal mirror
    let mut map = std::collections::BTreeMap::new();
    for &(i, j, v) in &entries {
        *map.entry((i, j)).or_insert(0.0) += v;
    }
    for (&(i, j), &v) in &map {
        let w = map.get(&(j, i)).copied().unwrap_or(0.0);
        if (v - w).abs() > SYMMETRY_TOL * v.abs().max(w.abs()) {
            return Err(IrmError::NotSymmetric { row: i, col: j });
        }
        let value = if i == j { v } else { 0.5 * (v + w) };
        // (v + w) / 2 is commutative, so both halves get the same bits
        triplets.push((i, j, value));
    }
    SparseSpdMatrix::from_triplets(n, &triplets)
}

/// Writes the lower triangle in `symmetric` coordinate format. Values use
/// the shortest representation that parses back to the same bits.
pub fn write_matrix_market(path: &Path, a: &SparseSpdMatrix) -> Result<()> {
    let lower: Vec<_> = a.triplets().filter(|&(i, j, _)| j <= i).collect();
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(out, "{} {} {}", a.n(), a.n(), lower.len());
    for (i, j, v) in lower {
        let _ = writeln!(out, "{} {} {:e}", i + 1, j + 1, v);
    }
    write_text(path, &out)
}

/// Reads a real `array` file holding one column.
pub fn read_rhs(path: &Path) -> Result<Vec<f64>> {
    let text = read_text(path)?;
    let (banner, mut data) = split_header(path, &text)?;
    if banner[2] != "array" || banner[3] != "real" {
        return Err(IrmError::format(path, "right-hand side must be a real array file"));
    }
    let size = data.next().ok_or_else(|| IrmError::format(path, "missing size line"))?;
    let mut it = size.split_whitespace();
    let rows: usize = parse_num(path, it.next(), "row count")?;
    let cols: usize = parse_num(path, it.next(), "column count")?;
    if cols != 1 {
        return Err(IrmError::format(path, format!("expected one column, found {cols}")));
    }
    let values = data
        .flat_map(str::split_whitespace)
        .map(|t| parse_num::<f64>(path, Some(t), "value"))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != rows {
        return Err(IrmError::format(path, format!("expected {rows} values, found {}", values.len())));
    }
    Ok(values)
}

pub fn write_rhs(path: &Path, b: &[f64]) -> Result<()> {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} 1", b.len());
    for v in b {
        let _ = writeln!(out, "{v:e}");
    }
    write_text(path, &out)
}

/// Reads a matrix and, when given, its right-hand side.
pub fn load_matrix_market(path: &Path, rhs: Option<&Path>) -> Result<(SparseSpdMatrix, Option<Vec<f64>>)> {
    let a = read_matrix_market(path)?;
    let b = match rhs {
        Some(p) => {
            let b = read_rhs(p)?;
            if b.len() != a.n() {
                return Err(IrmError::format(p, format!("length {} does not match n = {}", b.len(), a.n())));
            }
            Some(b)
        }
        None => None,
    };
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn reads_diagonal() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "d.mtx", "%%MatrixMarket matrix coordinate real symmetric\n% c\n2 2 2\n1 1 1\n2 2 4\n");
        let a = read_matrix_market(&p).unwrap();
        assert_eq!(a.diagonal(), vec![1.0, 4.0]);
    }

    #[test]
    fn general_missing_mirror_is_not_symmetric() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "g.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 2\n2 2 2\n2 1 0.5\n",
        );
        assert!(matches!(read_matrix_market(&p), Err(IrmError::NotSymmetric { .. })));
    }

    #[test]
    fn rejects_unsupported_files() {
        let dir = tempfile::tempdir().unwrap();
        for body in [
            "%%MatrixMarket matrix coordinate complex symmetric\n1 1 1\n1 1 1 0\n",
            "%%MatrixMarket matrix coordinate pattern symmetric\n1 1 1\n1 1\n",
            "%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1\n",
            "not a matrix\n",
        ] {
            let p = write(&dir, "bad.mtx", body);
            assert!(matches!(read_matrix_market(&p), Err(IrmError::Format { .. })), "{body}");
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_matrix_market(Path::new("/nonexistent/a.mtx")).unwrap_err();
        assert!(matches!(err, IrmError::Io { .. }));
    }

    #[test]
    fn rhs_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.mtx");
        let b = vec![0.1, -2.5e-300, 1.0 / 3.0];
        write_rhs(&p, &b).unwrap();
        assert_eq!(read_rhs(&p).unwrap(), b);
    }
}
