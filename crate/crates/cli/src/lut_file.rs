//! Binary remap tables.
//!
//! Little-endian: the 7 magic bytes `VPCLUT1`, `u32` width, `u32` height,
//! then `width·height` pairs of `f32` `(src_u, src_v)` in row-major order.
//! Invalid pixels are `(NaN, NaN)`.

use std::io::{Read, Write};
use std::path::Path;

use vpcstereo_core::vpc::RemapTable;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 7] = b"VPCLUT1";
const HEADER_LEN: usize = 7 + 4 + 4;

/// File size for a `width × height` table.
pub fn encoded_len(width: usize, height: usize) -> usize {
    HEADER_LEN + width * height * 8
}

pub fn write_lut(lut: &RemapTable, mut out: impl Write) -> std::io::Result<()> {
    let mut buf = Vec::with_capacity(encoded_len(lut.width(), lut.height()));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(lut.width() as u32).to_le_bytes());
    buf.extend_from_slice(&(lut.height() as u32).to_le_bytes());
    for [u, v] in lut.entries() {
        buf.extend_from_slice(&u.to_le_bytes());
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)
}

/// Parses a table; `what` names the source in error messages.
pub fn read_lut(mut input: impl Read, what: &Path) -> Result<RemapTable> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes).map_err(|e| Error::io(what, e))?;
    if bytes.len() < HEADER_LEN || &bytes[..7] != MAGIC {
        return Err(Error::format(what, "not a VPCLUT1 file (bad magic)"));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let (width, height) = (word(7) as usize, word(11) as usize);
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(HEADER_LEN));
    if expected != Some(bytes.len()) {
        return Err(Error::format(
            what,
            format!(
                "truncated or oversized table: {} bytes for {width}x{height}",
                bytes.len()
            ),
        ));
    }
    let entries = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| {
            [
                f32::from_le_bytes(c[0..4].try_into().expect("4 bytes")),
                f32::from_le_bytes(c[4..8].try_into().expect("4 bytes")),
            ]
        })
        .collect();
    RemapTable::from_entries(width, height, entries).map_err(|e| Error::format(what, e.to_string()))
}

pub fn save_lut(lut: &RemapTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_lut(lut, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_lut(path: impl AsRef<Path>) -> Result<RemapTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_lut(std::io::BufReader::new(file), path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> RemapTable {
        RemapTable::from_entries(
            2,
            2,
            vec![[0.5, 1.0], [f32::NAN, f32::NAN], [3.25, 0.0], [1e-3, 7.0]],
        )
        .unwrap()
    }

    #[test]
    fn two_by_two_layout() {
        let mut buf = Vec::new();
        write_lut(&table(), &mut buf).unwrap();
        assert_eq!(buf.len(), 7 + 8 + 2 * 2 * 2 * 4);
        assert_eq!(&buf[..7], b"VPCLUT1");
        assert_eq!(&buf[7..15], &[2, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(&buf[15..19], &0.5f32.to_le_bytes());
        let back = read_lut(&buf[..], Path::new("mem")).unwrap();
        assert_eq!(back, table());
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let mut buf = Vec::new();
        write_lut(&table(), &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_lut(&bad[..], Path::new("mem")).is_err());
        assert!(read_lut(&buf[..buf.len() - 1], Path::new("mem")).is_err());
        assert!(read_lut(&buf[..10], Path::new("mem")).is_err());
    }

    #[test]
    fn rejects_half_invalid_entries() {
        let mut buf = Vec::new();
        write_lut(&table(), &mut buf).unwrap();
        buf[15..19].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(read_lut(&buf[..], Path::new("mem")).is_err());
    }
}
