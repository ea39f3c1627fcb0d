use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::numerics::ComplexMatrix;
use crate::{Error, Result, C64};

const MATRIX_MAGIC: &str = "CDT-MAT v1";

/// `CDT-MAT v1 M N` followed by `M*N` lines of `re,im` in row-major order.
pub fn format_matrix(a: &ComplexMatrix<f64>) -> String {
    let mut out = String::with_capacity(48 * a.as_slice().len() + 32);
    writeln!(out, "{MATRIX_MAGIC} {} {}", a.rows(), a.cols()).unwrap();
    for z in a.as_slice() {
        writeln!(out, "{:.16e},{:.16e}", z.re, z.im).unwrap();
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix<f64>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let dims = header
        .strip_prefix(MATRIX_MAGIC)
        .ok_or_else(|| parse_err(1, "missing CDT-MAT v1 header"))?;
    let dims: Vec<usize> = dims
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(1, "bad dimension")))
        .collect::<Result<_>>()?;
    let [m, n] = dims[..] else {
        return Err(parse_err(1, "expected two dimensions"));
    };
    let mut data = Vec::with_capacity(m * n);
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        data.push(parse_pair(line, i + 2)?);
    }
    if data.len() != m * n {
        return Err(parse_err(
            data.len() + 2,
            &format!("expected {} entries, found {}", m * n, data.len()),
        ));
    }
    ComplexMatrix::from_row_major(m, n, data)
}

pub fn write_matrix(path: &Path, a: &ComplexMatrix<f64>) -> Result<()> {
    fs::write(path, format_matrix(a))?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix<f64>> {
    parse_matrix(&fs::read_to_string(path)?)
}

/// `index,re,im` with a header row.
pub fn format_vector_csv(v: &[C64]) -> String {
    let mut out = String::from("index,re,im\n");
    for (i, z) in v.iter().enumerate() {
        writeln!(out, "{i},{:.16e},{:.16e}", z.re, z.im).unwrap();
    }
    out
}

pub fn parse_vector_csv(text: &str) -> Result<Vec<C64>> {
    let mut v = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with("index")) {
            continue;
        }
        let (idx, rest) = line
            .split_once(',')
            .ok_or_else(|| parse_err(i + 1, "expected index,re,im"))?;
        let idx: usize = idx.trim().parse().map_err(|_| parse_err(i + 1, "bad index"))?;
        if idx != v.len() {
            return Err(parse_err(i + 1, &format!("index {idx} out of sequence")));
        }
        v.push(parse_pair(rest, i + 1)?);
    }
    Ok(v)
}

pub fn write_vector_csv(path: &Path, v: &[C64]) -> Result<()> {
    fs::write(path, format_vector_csv(v))?;
    Ok(())
}

pub fn read_vector_csv(path: &Path) -> Result<Vec<C64>> {
    parse_vector_csv(&fs::read_to_string(path)?)
}

fn parse_pair(s: &str, line: usize) -> Result<C64> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| parse_err(line, "expected re,im"))?;
    let re: f64 = re.trim().parse().map_err(|_| parse_err(line, "bad real part"))?;
    let im: f64 = im.trim().parse().map_err(|_| parse_err(line, "bad imaginary part"))?;
    Ok(C64::new(re, im))
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}
