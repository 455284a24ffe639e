//! Plain-text data formats: a `#`-prefixed JSON header line followed by CSV.
//!
//! Floats are always written with `{:.17e}` so that identical inputs produce
//! byte-identical files and every value round-trips exactly.

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

pub fn fmt(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn header_line<T: Serialize>(header: &T) -> String {
    format!("# {}\n", serde_json::to_string(header).expect("header serializes"))
}

/// Splits a document into its parsed header and the remaining CSV text.
pub fn split_header<T: DeserializeOwned>(text: &str) -> Result<(T, &str)> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let json = first
        .strip_prefix("# ")
        .ok_or_else(|| Error::Parse("missing JSON header".into()))?;
    let header = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((header, rest))
}

/// One CSV row per matrix row, columns `c0_re, c0_im, c1_re, …`.
pub fn matrix_block(m: &CMatrix) -> String {
    let mut out = String::new();
    out.push_str(
        &(0..m.ncols())
            .map(|j| format!("c{j}_re,c{j}_im"))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .flat_map(|j| [fmt(m[(i, j)].re), fmt(m[(i, j)].im)])
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Inverse of [`matrix_block`].
pub fn parse_matrix_block(text: &str) -> Result<CMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head = lines.next().ok_or_else(|| Error::Parse("empty matrix block".into()))?;
    let ncols = head.split(',').count() / 2;
    let mut data = Vec::new();
    let mut nrows = 0;
    for line in lines {
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<_>>()?;
        if vals.len() != 2 * ncols {
            return Err(Error::Parse(format!("row {nrows} has {} values", vals.len())));
        }
        data.extend(vals.chunks(2).map(|c| C64::new(c[0], c[1])));
        nrows += 1;
    }
    Ok(CMatrix::from_row_slice(nrows, ncols, &data))
}

/// A table with a header row; every value formatted with [`fmt`].
pub fn table(columns: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.iter().map(|&x| fmt(x)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip_is_exact() {
        let m = CMatrix::from_fn(3, 4, |i, j| C64::new(1.0 / (1.0 + i as f64), (j as f64).sqrt() - 0.1));
        let text = matrix_block(&m);
        assert_eq!(parse_matrix_block(&text).unwrap(), m);
    }

    #[test]
    fn header_roundtrip() {
        let text = format!("{}a,b\n", header_line(&vec![1.5, 2.0]));
        let (h, rest): (Vec<f64>, _) = split_header(&text).unwrap();
        assert_eq!(h, vec![1.5, 2.0]);
        assert_eq!(rest, "a,b\n");
    }
}
