use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Vector};

/// Result of ingesting a system from disk.
#[derive(Debug, Clone)]
pub struct LoadedSystem {
    pub a: DenseMatrix,
    pub b: Vector,
    /// Original indices of rows dropped because their norm was below 1e-14
    /// (only when normalization was requested).
    pub dropped_rows: Vec<usize>,
}

/// Reads a matrix from MatrixMarket (array or coordinate, densified) or
/// headerless CSV, paired with a right-hand side file (single CSV column or a
/// one-column MatrixMarket array). With `normalize` set, each surviving row
/// and its rhs entry are scaled by the inverse row norm; near-zero rows are
/// dropped and reported rather than divided by.
pub fn load_system(
    matrix_path: &Path,
    rhs_path: &Path,
    normalize: bool,
) -> Result<LoadedSystem> {
    let a = read_matrix(matrix_path)?;
    let b = read_vector(rhs_path)?;
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.len(),
        });
    }
    if !normalize {
        return Ok(LoadedSystem {
            a,
            b,
            dropped_rows: Vec::new(),
        });
    }

    let mut kept_rows: Vec<Vec<f64>> = Vec::with_capacity(a.nrows());
    let mut kept_b: Vec<f64> = Vec::with_capacity(a.nrows());
    let mut dropped = Vec::new();
    for i in 0..a.nrows() {
        let row = a.row(i)?;
        let nrm = crate::linalg::norm(row);
        if nrm < 1e-14 {
            dropped.push(i);
            continue;
        }
        kept_rows.push(row.iter().map(|v| v / nrm).collect());
        kept_b.push(b[i] / nrm);
    }
    if kept_rows.is_empty() {
        return Err(Error::BadDomain {
            reason: format!("all {} rows of {} are zero", a.nrows(), matrix_path.display()),
        });
    }
    Ok(LoadedSystem {
        a: DenseMatrix::from_rows(&kept_rows)?,
        b: Vector::new(kept_b)?,
        dropped_rows: dropped,
    })
}

/// Reads a dense or coordinate matrix; format detected from the first line.
pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let text = read_to_string(path)?;
    if text.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(&text, path)
    } else {
        parse_csv_matrix(&text, path)
    }
}

/// Reads a single-column vector from CSV lines or a MatrixMarket array file.
pub fn read_vector(path: &Path) -> Result<Vector> {
    let text = read_to_string(path)?;
    let m = if text.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(&text, path)?
    } else {
        parse_csv_matrix(&text, path)?
    };
    if m.ncols() != 1 {
        return Err(Error::Parse {
            path: display(path),
            line: 1,
            reason: format!("right-hand side must have one column, got {}", m.ncols()),
        });
    }
    let data: Vec<f64> = (0..m.nrows()).map(|i| m.get(i, 0)).collect();
    Vector::new(data)
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: display(path),
        source,
    })
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn parse_err(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: display(path),
        line,
        reason: reason.into(),
    }
}

fn parse_matrix_market(text: &str, path: &Path) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(
            path,
            1,
            "header must be '%%MatrixMarket matrix <format> <field> <symmetry>'",
        ));
    }
    let coordinate = match tokens[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(parse_err(path, 1, format!("unsupported format '{other}'"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(parse_err(path, 1, format!("unsupported field '{other}'"))),
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(parse_err(path, 1, format!("unsupported symmetry '{other}'")))
        }
    };

    // Skip comments and blank lines up to the size line.
    let mut size_line = None;
    for (idx, line) in lines.by_ref() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        size_line = Some((idx + 1, t.to_string()));
        break;
    }
    let (size_lineno, size_text) =
        size_line.ok_or_else(|| parse_err(path, 1, "missing size line"))?;
    let dims: Vec<usize> = size_text
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(path, size_lineno, format!("bad size line: {e}")))?;

    let expected_dims = if coordinate { 3 } else { 2 };
    if dims.len() != expected_dims {
        return Err(parse_err(
            path,
            size_lineno,
            format!("size line needs {expected_dims} integers, got {}", dims.len()),
        ));
    }
    let (m, n) = (dims[0], dims[1]);
    if m == 0 || n == 0 {
        return Err(parse_err(path, size_lineno, "matrix dimensions must be positive"));
    }
    if symmetric && m != n {
        return Err(parse_err(path, size_lineno, "symmetric matrix must be square"));
    }

    let mut entries = Vec::new();
    for (idx, line) in lines {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        entries.push((idx + 1, t));
    }

    let mut out = DenseMatrix::zeros(m, n)?;
    if coordinate {
        let nnz = dims[2];
        if entries.len() != nnz {
            return Err(parse_err(
                path,
                size_lineno,
                format!("expected {nnz} entries, found {}", entries.len()),
            ));
        }
        for (lineno, entry) in entries {
            let fields: Vec<&str> = entry.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(parse_err(path, lineno, "coordinate entries need 'i j value'"));
            }
            let i: usize = fields[0]
                .parse()
                .map_err(|e| parse_err(path, lineno, format!("bad row index: {e}")))?;
            let j: usize = fields[1]
                .parse()
                .map_err(|e| parse_err(path, lineno, format!("bad column index: {e}")))?;
            let v: f64 = fields[2]
                .parse()
                .map_err(|e| parse_err(path, lineno, format!("bad value: {e}")))?;
            if i < 1 || i > m || j < 1 || j > n {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("index ({i},{j}) outside {m}x{n}"),
                ));
            }
            if !v.is_finite() {
                return Err(parse_err(path, lineno, "non-finite value"));
            }
            // Duplicate entries accumulate; absent positions stay zero.
            let cur = out.get(i - 1, j - 1);
            out.set(i - 1, j - 1, cur + v);
            if symmetric && i != j {
                let cur = out.get(j - 1, i - 1);
                out.set(j - 1, i - 1, cur + v);
            }
        }
    } else {
        // Array format stores all m*n values in column-major order (upper
        // triangle only for symmetric).
        let expected = if symmetric { n * (n + 1) / 2 } else { m * n };
        if entries.len() != expected {
            return Err(parse_err(
                path,
                size_lineno,
                format!("expected {expected} values, found {}", entries.len()),
            ));
        }
        let mut it = entries.into_iter();
        let read_value = |lineno_value: (usize, &str)| -> Result<f64> {
            let (lineno, txt) = lineno_value;
            let v: f64 = txt
                .parse()
                .map_err(|e| parse_err(path, lineno, format!("bad value: {e}")))?;
            if !v.is_finite() {
                return Err(parse_err(path, lineno, "non-finite value"));
            }
            Ok(v)
        };
        if symmetric {
            for j in 0..n {
                for i in j..m {
                    let v = read_value(it.next().expect("count checked"))?;
                    out.set(i, j, v);
                    out.set(j, i, v);
                }
            }
        } else {
            for j in 0..n {
                for i in 0..m {
                    let v = read_value(it.next().expect("count checked"))?;
                    out.set(i, j, v);
                }
            }
        }
    }
    Ok(out)
}

fn parse_csv_matrix(text: &str, path: &Path) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let fields: Vec<f64> = t
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(path, idx + 1, format!("bad number: {e}")))?;
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(path, idx + 1, "non-finite value"));
        }
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(parse_err(
                    path,
                    idx + 1,
                    format!("row has {} fields, expected {w}", fields.len()),
                ));
            }
            _ => {}
        }
        rows.push(fields);
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "no data rows"));
    }
    DenseMatrix::from_rows(&rows)
}

/// Writes a matrix in MatrixMarket array format (column-major values, full
/// shortest-round-trip precision).
pub fn write_matrix_market(path: &Path, a: &DenseMatrix) -> Result<()> {
    let mut text = String::from("%%MatrixMarket matrix array real general\n");
    text.push_str(&format!("{} {}\n", a.nrows(), a.ncols()));
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            text.push_str(&format!("{}\n", a.get(i, j)));
        }
    }
    write_file(path, &text)
}

/// Writes one value per line.
pub fn write_csv_column(path: &Path, values: &[f64]) -> Result<()> {
    let mut text = String::with_capacity(values.len() * 20);
    for v in values {
        text.push_str(&format!("{v}\n"));
    }
    write_file(path, &text)
}

/// Writes one index per line.
pub fn write_index_column(path: &Path, values: &[usize]) -> Result<()> {
    let mut text = String::with_capacity(values.len() * 8);
    for v in values {
        text.push_str(&format!("{v}\n"));
    }
    write_file(path, &text)
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: display(path),
        source,
    })
}
