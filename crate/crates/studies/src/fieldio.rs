//! The `CHNF` field format and a CSV export.
//!
//! ```text
//! offset  size  content
//!      0     4  b"CHNF"
//!      4     4  format version (u32, = 1)
//!      8     8  nx (u64)
//!     16     8  ny (u64)
//!     24     8  Lx (f64)
//!     32  8·nx·ny  values (f64), x-major: index i·ny + j
//! ```
//!
//! All numbers are little-endian.

use std::fs;
use std::io::Write;
use std::path::Path;

use equil_core::{ChannelGrid, Field};

use crate::error::{io_err, Result, StudiesError};

pub const MAGIC: &[u8; 4] = b"CHNF";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 32;

pub fn encode(f: &Field) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.nx() as u64).to_le_bytes());
    out.extend_from_slice(&(g.ny() as u64).to_le_bytes());
    out.extend_from_slice(&g.lx().to_le_bytes());
    for v in f.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Field> {
    if bytes.len() < HEADER_LEN {
        return Err(StudiesError::Format(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(StudiesError::Format("missing CHNF magic".into()));
    }
    let word = |k: usize| -> [u8; 8] { bytes[k..k + 8].try_into().unwrap() };
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(StudiesError::Format(format!("unsupported version {version}")));
    }
    let nx = u64::from_le_bytes(word(8));
    let ny = u64::from_le_bytes(word(16));
    let lx = f64::from_le_bytes(word(24));
    let n = nx
        .checked_mul(ny)
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| StudiesError::Format(format!("grid {nx}x{ny} is too large")))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 8 * n {
        return Err(StudiesError::Format(format!(
            "{nx}x{ny} grid needs {} value bytes, found {}",
            8 * n,
            body.len()
        )));
    }
    let grid = ChannelGrid::new(nx as usize, ny as usize, lx)?;
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Field::from_values(grid, values)?)
}

pub fn write_field(path: &Path, f: &Field) -> Result<()> {
    fs::write(path, encode(f)).map_err(io_err(path))
}

pub fn read_field(path: &Path) -> Result<Field> {
    decode(&fs::read(path).map_err(io_err(path))?)
}

/// `x,y,value` rows.
pub fn write_field_csv(path: &Path, f: &Field) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "value"])?;
    let g = f.grid();
    for i in 0..g.nx() {
        for j in 0..g.ny() {
            w.write_record([g.x(i).to_string(), g.y(j).to_string(), f.get(i, j).to_string()])?;
        }
    }
    w.flush().map_err(io_err(path))
}

/// Writes `bytes` to `path` via a sibling temporary file.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("part");
    let mut file = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    file.write_all(bytes).map_err(io_err(&tmp))?;
    drop(file);
    fs::rename(&tmp, path).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = ChannelGrid::new(9, 5, 1.5).unwrap();
        let f = Field::from_fn(g, |x, y| x.sin() * (1.0 - y * y) + 1e-300);
        let back = decode(&encode(&f)).unwrap();
        assert_eq!(back, f);
        assert_eq!(encode(&f).len(), HEADER_LEN + 8 * 45);
    }

    #[test]
    fn header_layout() {
        let g = ChannelGrid::new(3, 3, 2.0).unwrap();
        let b = encode(&Field::zeros(g));
        assert_eq!(&b[..4], b"CHNF");
        assert_eq!(u64::from_le_bytes(b[8..16].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(b[24..32].try_into().unwrap()), 2.0);
    }

    #[test]
    fn truncated_and_foreign_files_are_rejected() {
        let g = ChannelGrid::new(3, 3, 2.0).unwrap();
        let b = encode(&Field::zeros(g));
        assert!(matches!(decode(&b[..b.len() - 1]), Err(StudiesError::Format(_))));
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(matches!(decode(&bad), Err(StudiesError::Format(_))));
        assert!(matches!(decode(&b[..10]), Err(StudiesError::Format(_))));
    }
}
