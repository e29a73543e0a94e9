//! Matrix file formats.
//!
//! Text: a header line `rows cols`, then one `re im` pair per line in row-major order.
//!
//! Binary: a 16-byte header (`b"CSPC"`, `u32` rows, `u32` cols, `u32` format version),
//! then little-endian `f64` pairs `(re, im)` in row-major order.

use std::io::{BufRead, Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

pub const BINARY_MAGIC: &[u8; 4] = b"CSPC";
pub const BINARY_VERSION: u32 = 1;

pub fn write_text<W: Write>(m: &ComplexMatrix, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", m.nrows(), m.ncols())?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let v = m[(r, c)];
            // `{:e}` with default precision round-trips f64 exactly.
            writeln!(w, "{:e} {:e}", v.re, v.im)?;
        }
    }
    Ok(())
}

pub fn read_text<R: BufRead>(r: R) -> Result<ComplexMatrix> {
    let mut lines = r
        .lines()
        .map(|l| l.map_err(Error::from))
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty input".into()))??;
    let mut dims = header.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|e| Error::Format(format!("bad dimension {t:?}: {e}")))
    });
    let (rows, cols) = match (dims.next(), dims.next(), dims.next()) {
        (Some(r), Some(c), None) => (r?, c?),
        _ => return Err(Error::Format(format!("bad header line {header:?}"))),
    };
    if rows == 0 || cols == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut values = Vec::with_capacity(rows * cols);
    for line in lines {
        let line = line?;
        let mut parts = line.split_whitespace();
        let (re, im) = match (parts.next(), parts.next(), parts.next()) {
            (Some(re), Some(im), None) => (re, im),
            _ => return Err(Error::Format(format!("expected `re im`, got {line:?}"))),
        };
        let parse = |t: &str| {
            t.parse::<f64>()
                .map_err(|e| Error::Format(format!("bad number {t:?}: {e}")))
        };
        values.push(Complex64::new(parse(re)?, parse(im)?));
    }
    if values.len() != rows * cols {
        return Err(Error::Format(format!(
            "expected {} entries, found {}",
            rows * cols,
            values.len()
        )));
    }
    ComplexMatrix::from_row_major(rows, cols, values)
}

pub fn write_binary<W: Write>(m: &ComplexMatrix, mut w: W) -> Result<()> {
    let dim = |d: usize| {
        u32::try_from(d).map_err(|_| Error::Format(format!("dimension {d} exceeds u32")))
    };
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&dim(m.nrows())?.to_le_bytes())?;
    w.write_all(&dim(m.ncols())?.to_le_bytes())?;
    w.write_all(&BINARY_VERSION.to_le_bytes())?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let v = m[(r, c)];
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<ComplexMatrix> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if &header[0..4] != BINARY_MAGIC {
        return Err(Error::Format("bad magic, expected CSPC".into()));
    }
    let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
    let (rows, cols, version) = (word(4) as usize, word(8) as usize, word(12));
    if version != BINARY_VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    if rows == 0 || cols == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != rows * cols * 16 {
        return Err(Error::Format(format!(
            "expected {} payload bytes, found {}",
            rows * cols * 16,
            payload.len()
        )));
    }
    let values = payload
        .chunks_exact(16)
        .map(|b| {
            Complex64::new(
                f64::from_le_bytes(b[0..8].try_into().unwrap()),
                f64::from_le_bytes(b[8..16].try_into().unwrap()),
            )
        })
        .collect();
    ComplexMatrix::from_row_major(rows, cols, values)
}

/// Reads either format, sniffing the binary magic.
pub fn read_any(bytes: &[u8]) -> Result<ComplexMatrix> {
    if bytes.starts_with(BINARY_MAGIC) {
        read_binary(bytes)
    } else {
        read_text(bytes)
    }
}
