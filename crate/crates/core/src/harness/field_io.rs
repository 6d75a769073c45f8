//! `LFPPFLD1` binary field dumps.
//!
//! Layout: magic `LFPPFLD1`, `u64` n, `f64` L, `f64` origin x, `f64`
//! origin y (40 bytes, little-endian), then `n * n` little-endian doubles in
//! row-major order.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{LfppError, Result};
use crate::gff::GridField;

pub const MAGIC: &[u8; 8] = b"LFPPFLD1";
pub const HEADER_LEN: usize = 40;

pub fn write_field(field: &GridField, out: &mut impl Write) -> Result<()> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * field.values().len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(field.n() as u64).to_le_bytes());
    buf.extend_from_slice(&field.length().to_le_bytes());
    buf.extend_from_slice(&field.origin()[0].to_le_bytes());
    buf.extend_from_slice(&field.origin()[1].to_le_bytes());
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn save_field(field: &GridField, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_field(field, &mut f)?;
    f.flush()?;
    Ok(())
}

fn format_err(offset: usize, message: impl Into<String>) -> LfppError {
    LfppError::Format { offset: offset as u64, message: message.into() }
}

fn word(bytes: &[u8], offset: usize, what: &str) -> Result<[u8; 8]> {
    bytes
        .get(offset..offset + 8)
        .map(|s| s.try_into().expect("slice of length 8"))
        .ok_or_else(|| format_err(bytes.len(), format!("file ends inside {what}")))
}

pub fn read_field(bytes: &[u8]) -> Result<GridField> {
    if word(bytes, 0, "magic")? != *MAGIC {
        return Err(format_err(0, "bad magic, expected LFPPFLD1"));
    }
    let n = u64::from_le_bytes(word(bytes, 8, "lattice size")?);
    if n < 2 || !n.is_power_of_two() || n > 1 << 20 {
        return Err(format_err(8, format!("lattice size {n} is not a power of two")));
    }
    let length = f64::from_le_bytes(word(bytes, 16, "side length")?);
    if !(length > 0.0 && length.is_finite()) {
        return Err(format_err(16, format!("side length {length} is not positive")));
    }
    let ox = f64::from_le_bytes(word(bytes, 24, "origin")?);
    let oy = f64::from_le_bytes(word(bytes, 32, "origin")?);
    if !(ox.is_finite() && oy.is_finite()) {
        return Err(format_err(24, "origin is not finite"));
    }
    let n = n as usize;
    let expected = HEADER_LEN + 8 * n * n;
    if bytes.len() < expected {
        return Err(format_err(bytes.len(), format!("truncated: expected {expected} bytes")));
    }
    if bytes.len() > expected {
        return Err(format_err(expected, "trailing bytes after the last value"));
    }
    let mut values = Vec::with_capacity(n * n);
    for (k, chunk) in bytes[HEADER_LEN..].chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().expect("chunk of length 8"));
        if !v.is_finite() {
            return Err(format_err(HEADER_LEN + 8 * k, "non-finite field value"));
        }
        values.push(v);
    }
    GridField::new(n, length, [ox, oy], values)
}

pub fn load_field(path: &Path) -> Result<GridField> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    read_field(&bytes)
}
