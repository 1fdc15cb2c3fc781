//! Binary field snapshots.
//!
//! Little-endian layout: `b"CNLS"`, u32 version, u8 geometry code, u8 d,
//! u64 n, f64 extent, f64 t, f64 dt_last, then `(re, im)` f64 pairs in
//! storage order.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::IoError;
use crate::{Field, Geometry, Grid};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"CNLS";
pub const CHECKPOINT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 1 + 1 + 8 + 8 + 8 + 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub field: Field,
    pub dt_last: f64,
}

pub fn encode(field: &Field, dt_last: f64) -> Vec<u8> {
    let g = field.grid;
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * field.len());
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.push(g.geometry().code());
    out.push(g.dim() as u8);
    out.extend_from_slice(&(g.n() as u64).to_le_bytes());
    out.extend_from_slice(&g.extent().to_le_bytes());
    out.extend_from_slice(&field.t.to_le_bytes());
    out.extend_from_slice(&dt_last.to_le_bytes());
    for z in &field.values {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint, IoError> {
    let bad = |m: &str| IoError::Checkpoint(m.to_string());
    if bytes.len() < HEADER_LEN {
        return Err(bad("truncated header"));
    }
    if &bytes[..4] != CHECKPOINT_MAGIC {
        return Err(bad("magic mismatch"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(IoError::Checkpoint(format!("unsupported version {version}")));
    }
    let geometry = Geometry::from_code(bytes[8]).ok_or_else(|| bad("unknown geometry code"))?;
    let d = bytes[9] as usize;
    let n = u64::from_le_bytes(bytes[10..18].try_into().unwrap()) as usize;
    let extent = f64_at(bytes, 18);
    let t = f64_at(bytes, 26);
    let dt_last = f64_at(bytes, 34);
    let grid = Grid::new(geometry, d, n, extent)?;
    let count = grid.node_count();
    if bytes.len() != HEADER_LEN + 16 * count {
        return Err(IoError::Checkpoint(format!("expected {count} samples, payload has {} bytes", bytes.len() - HEADER_LEN)));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| Complex64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    Ok(Checkpoint { field: Field::new(grid, values)?.with_time(t), dt_last })
}

pub fn write_checkpoint(path: &Path, field: &Field, dt_last: f64) -> Result<(), IoError> {
    let err = |source| IoError::File { path: path.display().to_string(), source };
    let mut f = std::fs::File::create(path).map_err(err)?;
    f.write_all(&encode(field, dt_last)).map_err(err)
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint, IoError> {
    let err = |source| IoError::File { path: path.display().to_string(), source };
    let mut bytes = Vec::new();
    std::fs::File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(err)?;
    decode(&bytes)
}
