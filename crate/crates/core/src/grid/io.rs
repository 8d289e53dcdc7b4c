//! Binary grid files and CSV export.
//!
//! Layout (little-endian): magic `MRY1`, `u32` dim, `u32` cells per axis, `f64` half
//! width, then `cells^dim` `f64` values in row-major order.

use std::fs;
use std::path::Path;

use super::{GridFunction, GridSpec};
use crate::error::{MorreyError, Result};

const MAGIC: &[u8; 3] = b"MRY";
const VERSION: u8 = b'1';
const HEADER_LEN: usize = 4 + 4 + 4 + 8;

pub fn write_grid_bytes(f: &GridFunction) -> Vec<u8> {
    let spec = f.spec();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * spec.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(spec.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(spec.cells_per_axis() as u32).to_le_bytes());
    out.extend_from_slice(&spec.half_width().to_le_bytes());
    for v in f.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_grid_bytes(bytes: &[u8]) -> Result<GridFunction> {
    if bytes.len() < HEADER_LEN {
        return Err(MorreyError::Format(format!("file too short for header ({} bytes)", bytes.len())));
    }
    if &bytes[..3] != MAGIC {
        return Err(MorreyError::Format("bad magic".into()));
    }
    if bytes[3] != VERSION {
        return Err(MorreyError::Format(format!("unsupported version '{}'", char::from(bytes[3]).escape_default())));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let dim = u32_at(4) as usize;
    let cells = u32_at(8) as usize;
    let half_width = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let spec = GridSpec::new(dim, half_width, cells)?;
    let payload = &bytes[HEADER_LEN..];
    let expected = 8 * spec.len();
    if payload.len() != expected {
        return Err(MorreyError::Format(format!("payload has {} bytes, header implies {expected}", payload.len())));
    }
    let values = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect::<Vec<_>>();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(MorreyError::Format(format!("non-finite value at cell {i}")));
    }
    Ok(GridFunction::from_raw(spec, values))
}

pub fn write_grid(f: &GridFunction, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, write_grid_bytes(f))?;
    Ok(())
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<GridFunction> {
    read_grid_bytes(&fs::read(path)?)
}

/// One row per cell: coordinates then value.
pub fn write_csv(f: &GridFunction, path: impl AsRef<Path>) -> Result<()> {
    let spec = f.spec();
    let mut w = csv::Writer::from_path(path)?;
    let axes = ["x", "y", "z"];
    let mut header: Vec<&str> = axes[..spec.dim()].to_vec();
    header.push("value");
    w.write_record(&header)?;
    for (i, v) in f.values().iter().enumerate() {
        let c = spec.center(i);
        let mut row: Vec<String> = c[..spec.dim()].iter().map(|x| x.to_string()).collect();
        row.push(v.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
