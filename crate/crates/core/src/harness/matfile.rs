//! Plain-text matrix files: a header line `dim n count m`, then the `m`
//! matrices as `n` lines each of `n` whitespace-separated floats written
//! with 17 significant digits, row-major.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Writes square matrices given by their row-major entries.
pub fn write_matrices<W: Write>(mut w: W, n: usize, matrices: &[Vec<f64>]) -> std::io::Result<()> {
    writeln!(w, "dim {n} count {}", matrices.len())?;
    for m in matrices {
        assert_eq!(m.len(), n * n, "matrix entries must number n²");
        for row in m.chunks(n) {
            let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
    }
    Ok(())
}

/// Reads a matrix file; returns `n` and the row-major entries of each matrix.
pub fn read_matrices<R: BufRead>(r: R) -> Result<(usize, Vec<Vec<f64>>)> {
    let bad = |msg: String| Error::InvalidInput(format!("matrix file: {msg}"));
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty file".into()))?
        .map_err(|e| bad(e.to_string()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, m) = match fields.as_slice() {
        ["dim", n, "count", m] => (
            n.parse::<usize>().map_err(|e| bad(format!("dim: {e}")))?,
            m.parse::<usize>().map_err(|e| bad(format!("count: {e}")))?,
        ),
        _ => return Err(bad(format!("expected `dim n count m`, got `{header}`"))),
    };
    if n == 0 {
        return Err(bad("dim must be positive".into()));
    }
    let mut values = Vec::with_capacity(n * n * m);
    for (k, line) in lines.enumerate() {
        let line = line.map_err(|e| bad(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| bad(format!("line {}: {e}", k + 2))))
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(bad(format!("line {} has {} values, expected {n}", k + 2, row.len())));
        }
        values.extend(row);
    }
    if values.len() != n * n * m {
        return Err(bad(format!("expected {m} matrices of size {n}, found {} values", values.len())));
    }
    Ok((n, values.chunks(n * n).map(<[f64]>::to_vec).collect()))
}
