//! Binary wavefunction dumps for debugging.
//!
//! Layout: an 8-byte little-endian `u64` count `n`, followed by `n` pairs of
//! little-endian `f64` values `(re, im)`.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

pub fn encode(values: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 16 * values.len());
    out.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for z in values {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Vec<Complex64>> {
    let bad = |m: String| Error::invalid("snapshot", m);
    if bytes.len() < 8 {
        return Err(bad("missing count header".into()));
    }
    let n = u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes")) as usize;
    let body = &bytes[8..];
    if n.checked_mul(16) != Some(body.len()) {
        return Err(bad(format!("count {n} does not match {} payload bytes", body.len())));
    }
    Ok(body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect())
}

pub fn write_snapshot(path: &Path, values: &[Complex64]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(&encode(values)).map_err(|e| io_err(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Vec<Complex64>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(|e| io_err(path, e))?;
    decode(&bytes)
}
