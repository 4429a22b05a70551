//! Matrix Market reader and writer.
//!
//! Supports `coordinate real general|symmetric` for matrices and
//! `array real general` for dense column vectors. Indices are 1-based on disk.

use std::io::{BufRead, Write};

use super::CsrMatrix;
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Header line and remaining non-comment lines.
fn read_body<R: BufRead>(reader: R) -> Result<(String, Vec<(usize, String)>)> {
    let mut header = None;
    let mut body = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if header.is_none() {
            if !line.starts_with("%%MatrixMarket") {
                return Err(parse_err(k + 1, "missing %%MatrixMarket header"));
            }
            header = Some(line.to_lowercase());
            continue;
        }
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        body.push((k + 1, t.to_string()));
    }
    let header = header.ok_or_else(|| parse_err(1, "empty file"))?;
    Ok((header, body))
}

fn nums<T: std::str::FromStr>(line: usize, s: &str, want: usize) -> Result<Vec<T>> {
    let v: Vec<T> = s
        .split_whitespace()
        .map(|x| {
            x.parse::<T>()
                .map_err(|_| parse_err(line, format!("bad number '{x}'")))
        })
        .collect::<Result<_>>()?;
    if v.len() != want {
        return Err(parse_err(
            line,
            format!("expected {want} fields, found {}", v.len()),
        ));
    }
    Ok(v)
}

pub fn read_matrix<R: BufRead>(reader: R) -> Result<CsrMatrix> {
    let (header, body) = read_body(reader)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 5 || fields[1] != "matrix" || fields[3] != "real" {
        return Err(parse_err(1, format!("unsupported header '{header}'")));
    }
    let symmetric = match fields[4] {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };
    let mut lines = body.into_iter();
    let (ln, size) = lines
        .next()
        .ok_or_else(|| parse_err(2, "missing size line"))?;
    match fields[2] {
        "coordinate" => {
            let d: Vec<usize> = nums(ln, &size, 3)?;
            let (rows, cols, nnz) = (d[0], d[1], d[2]);
            let mut trip = Vec::with_capacity(if symmetric { 2 * nnz } else { nnz });
            for (ln, l) in lines.by_ref().take(nnz) {
                let parts: Vec<&str> = l.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(parse_err(ln, "expected 'row col value'"));
                }
                let i: usize = parts[0]
                    .parse()
                    .map_err(|_| parse_err(ln, "bad row index"))?;
                let j: usize = parts[1]
                    .parse()
                    .map_err(|_| parse_err(ln, "bad column index"))?;
                let v: f64 = parts[2].parse().map_err(|_| parse_err(ln, "bad value"))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(ln, format!("index ({i}, {j}) out of range")));
                }
                trip.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    trip.push((j - 1, i - 1, v));
                }
            }
            if trip.len() < nnz {
                return Err(parse_err(ln, "fewer entries than declared"));
            }
            CsrMatrix::from_triplets(rows, cols, trip)
        }
        "array" => {
            let d: Vec<usize> = nums(ln, &size, 2)?;
            let (rows, cols) = (d[0], d[1]);
            let vals: Vec<f64> = lines
                .map(|(ln, l)| nums::<f64>(ln, &l, 1).map(|v| v[0]))
                .collect::<Result<_>>()?;
            if vals.len() != rows * cols {
                return Err(parse_err(ln, "array length does not match size line"));
            }
            // array storage is column-major
            let trip = (0..rows * cols).map(|k| (k % rows, k / rows, vals[k]));
            CsrMatrix::from_triplets(rows, cols, trip)
        }
        other => Err(parse_err(1, format!("unsupported format '{other}'"))),
    }
}

pub fn write_matrix<W: Write>(mut w: W, m: &CsrMatrix, symmetric: bool) -> Result<()> {
    if symmetric {
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        let lower = m.lower();
        writeln!(w, "{} {} {}", m.rows(), m.cols(), lower.nnz())?;
        for (i, j, v) in lower.triplets() {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
        }
    } else {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
        for (i, j, v) in m.triplets() {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
        }
    }
    Ok(())
}

pub fn write_vector<W: Write>(mut w: W, v: &[f64]) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} 1", v.len())?;
    for x in v {
        writeln!(w, "{x:e}")?;
    }
    Ok(())
}

pub fn read_vector<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let m = read_matrix(reader)?;
    if m.cols() != 1 {
        return Err(parse_err(2, "vector file must have one column"));
    }
    Ok(m.to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_general_and_symmetric() {
        let m = CsrMatrix::from_dense(2, 3, &[1.0, 0.0, -2.5, 0.0, 3.0, 1e-20]).unwrap();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m, false).unwrap();
        assert_eq!(read_matrix(buf.as_slice()).unwrap(), m);

        let s = CsrMatrix::tridiag(4, -1.0, 2.0, -1.0);
        let mut buf = Vec::new();
        write_matrix(&mut buf, &s, true).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("4 4 7"));
        assert_eq!(read_matrix(buf.as_slice()).unwrap(), s);
    }

    #[test]
    fn vector_roundtrip() {
        let v = vec![1.5, 0.0, -3.0];
        let mut buf = Vec::new();
        write_vector(&mut buf, &v).unwrap();
        assert_eq!(read_vector(buf.as_slice()).unwrap(), v);
    }

    #[test]
    fn bad_index_is_a_parse_error() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
        assert!(matches!(
            read_matrix(text.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
