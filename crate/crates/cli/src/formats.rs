//! Text formats for sparse GF(2) matrices.
//!
//! Two formats are supported and both round-trip exactly:
//!
//! * **alist**: first line `rows cols`, second line the per-row degrees,
//!   then one line per row listing its 1-based column indices.
//! * **coordinate**: first line `rows cols`, then one `r c` pair per line
//!   with 0-based indices, until end of file.
//!
//! [`load_matrix`] and [`save_matrix`] dispatch on the file extension:
//! `.alist` selects the alist format, anything else the coordinate format.

use std::fs;
use std::path::Path;

use qldpc_core::gf2::{Gf2Error, SparseBitMatrix};
use thiserror::Error;

/// Errors from reading or writing matrix files.
#[derive(Debug, Error)]
pub enum FormatError {
    /// Underlying filesystem failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    /// The file content does not parse as the expected format.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// Parsed indices violate the declared matrix shape.
    #[error("matrix error: {0}")]
    Matrix(#[from] Gf2Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

fn parse_pair(text: &str, line: usize, what: &str) -> Result<(usize, usize), FormatError> {
    let mut it = text.split_whitespace();
    let a = it
        .next()
        .ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse::<usize>()
        .map_err(|e| parse_err(line, format!("bad {what}: {e}")))?;
    let b = it
        .next()
        .ok_or_else(|| parse_err(line, format!("missing second value in {what}")))?
        .parse::<usize>()
        .map_err(|e| parse_err(line, format!("bad {what}: {e}")))?;
    if it.next().is_some() {
        return Err(parse_err(line, format!("trailing tokens after {what}")));
    }
    Ok((a, b))
}

/// Serializes a matrix in the alist format.
#[must_use]
pub fn to_alist(m: &SparseBitMatrix) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    let degrees: Vec<String> = (0..m.rows()).map(|r| m.row(r).len().to_string()).collect();
    out.push_str(&degrees.join(" "));
    out.push('\n');
    for r in 0..m.rows() {
        let indices: Vec<String> = m.row(r).iter().map(|&c| (c + 1).to_string()).collect();
        out.push_str(&indices.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a matrix from the alist format.
pub fn from_alist(text: &str) -> Result<SparseBitMatrix, FormatError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let (rows, cols) = parse_pair(header, 1, "rows/cols header")?;

    let degree_line = lines
        .next()
        .ok_or_else(|| parse_err(2, "missing degree line"))?;
    let degrees: Vec<usize> = degree_line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|e| parse_err(2, format!("bad degree: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if degrees.len() != rows {
        return Err(parse_err(
            2,
            format!("expected {rows} degrees, found {}", degrees.len()),
        ));
    }

    let mut row_supports = Vec::with_capacity(rows);
    for (r, &degree) in degrees.iter().enumerate() {
        let line_no = 3 + r;
        let line = lines
            .next()
            .ok_or_else(|| parse_err(line_no, format!("missing row {r}")))?;
        let indices: Vec<u32> = line
            .split_whitespace()
            .map(|tok| {
                let one_based = tok
                    .parse::<u32>()
                    .map_err(|e| parse_err(line_no, format!("bad column index: {e}")))?;
                if one_based == 0 {
                    return Err(parse_err(line_no, "column indices are 1-based"));
                }
                Ok(one_based - 1)
            })
            .collect::<Result<_, _>>()?;
        if indices.len() != degree {
            return Err(parse_err(
                line_no,
                format!("row {r} declares degree {degree} but lists {}", indices.len()),
            ));
        }
        row_supports.push(indices);
    }
    for (extra, line) in lines.enumerate() {
        if !line.trim().is_empty() {
            return Err(parse_err(3 + rows + extra, "trailing content after last row"));
        }
    }
    Ok(SparseBitMatrix::from_rows(row_supports, cols)?)
}

/// Serializes a matrix in the coordinate format.
#[must_use]
pub fn to_coordinates(m: &SparseBitMatrix) -> String {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    for r in 0..m.rows() {
        for &c in m.row(r) {
            out.push_str(&format!("{r} {c}\n"));
        }
    }
    out
}

/// Parses a matrix from the coordinate format.
pub fn from_coordinates(text: &str) -> Result<SparseBitMatrix, FormatError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let (rows, cols) = parse_pair(header, 1, "rows/cols header")?;
    let mut row_supports = vec![Vec::new(); rows];
    for (offset, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = 2 + offset;
        let (r, c) = parse_pair(line, line_no, "entry")?;
        if r >= rows {
            return Err(parse_err(line_no, format!("row {r} out of range for {rows} rows")));
        }
        row_supports[r].push(u32::try_from(c).map_err(|_| parse_err(line_no, "column too large"))?);
    }
    Ok(SparseBitMatrix::from_rows(row_supports, cols)?)
}

fn is_alist(path: &Path) -> bool {
    path.extension().is_some_and(|ext| ext == "alist")
}

/// Reads a matrix file, picking the format from the extension.
pub fn load_matrix(path: &Path) -> Result<SparseBitMatrix, FormatError> {
    let text = fs::read_to_string(path)?;
    if is_alist(path) {
        from_alist(&text)
    } else {
        from_coordinates(&text)
    }
}

/// Writes a matrix file, picking the format from the extension.
pub fn save_matrix(path: &Path, m: &SparseBitMatrix) -> Result<(), FormatError> {
    let text = if is_alist(path) { to_alist(m) } else { to_coordinates(m) };
    fs::write(path, text)?;
    Ok(())
}
