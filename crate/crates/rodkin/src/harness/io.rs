//! On-disk artifacts: the binary field-file format and CSV tables.
//!
//! Field files are fixed-layout and trivially parseable in any language:
//! a 5-byte magic `KINF1`, little-endian `u32` nx, ny, ntheta, a
//! little-endian `f64` time stamp, the nx·ny·ntheta `f64` payload with the
//! orientation index fastest (then y, then x), and a trailing 64-bit FNV-1a
//! checksum of the payload bytes. Round trips are bit-exact.
//!
//! CSV tables use the shortest round-trip decimal form for every number, so
//! rereading a table reproduces the written values exactly.

use std::path::Path;

use thiserror::Error;

use crate::diagnostics::{EnergyLedger, LedgerLayout};
use crate::grid::{GridError, GridSpec, KineticField};

pub const FIELD_MAGIC: [u8; 5] = *b"KINF1";
const HEADER_LEN: usize = 5 + 3 * 4 + 8;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a field file: magic bytes {0:?}")]
    BadMagic([u8; 5]),
    #[error("field file truncated: expected {expected} bytes, found {got}")]
    Truncated { expected: usize, got: usize },
    #[error("field file corrupt: stored checksum {stored:#018x}, computed {computed:#018x}")]
    Checksum { stored: u64, computed: u64 },
    #[error("field file declares an unusable grid: {0}")]
    Grid(#[from] GridError),
    #[error("field grid {got:?} does not match the configured grid {expected:?}")]
    GridMismatch {
        expected: (usize, usize, usize),
        got: (usize, usize, usize),
    },
    #[error("table line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

/// 64-bit FNV-1a over a byte slice.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Serializes a field to its byte representation.
pub fn field_bytes(f: &KineticField) -> Vec<u8> {
    let grid = f.grid();
    let n = grid.nx() * grid.ny() * grid.ntheta();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * n + 8);
    out.extend_from_slice(&FIELD_MAGIC);
    out.extend_from_slice(&(grid.nx() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.ny() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.ntheta() as u32).to_le_bytes());
    out.extend_from_slice(&f.time.to_le_bytes());
    // Logical iteration order of the array is x slowest, orientation fastest,
    // matching the declared layout regardless of memory representation.
    for v in f.values.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let checksum = fnv1a(&out[HEADER_LEN..]);
    out.extend_from_slice(&checksum.to_le_bytes());
    out
}

/// Parses the byte representation back into a field.
pub fn field_from_bytes(bytes: &[u8]) -> Result<KineticField, IoError> {
    if bytes.len() < HEADER_LEN {
        return Err(IoError::Truncated {
            expected: HEADER_LEN,
            got: bytes.len(),
        });
    }
    let mut magic = [0u8; 5];
    magic.copy_from_slice(&bytes[..5]);
    if magic != FIELD_MAGIC {
        return Err(IoError::BadMagic(magic));
    }
    let dim = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let (nx, ny, ntheta) = (dim(5), dim(9), dim(13));
    let time = f64::from_le_bytes(bytes[17..25].try_into().unwrap());
    let n = nx
        .checked_mul(ny)
        .and_then(|p| p.checked_mul(ntheta))
        .ok_or(IoError::Truncated {
            expected: usize::MAX,
            got: bytes.len(),
        })?;
    let expected = HEADER_LEN + 8 * n + 8;
    if bytes.len() != expected {
        return Err(IoError::Truncated {
            expected,
            got: bytes.len(),
        });
    }
    let payload = &bytes[HEADER_LEN..HEADER_LEN + 8 * n];
    let stored = u64::from_le_bytes(bytes[expected - 8..].try_into().unwrap());
    let computed = fnv1a(payload);
    if stored != computed {
        return Err(IoError::Checksum { stored, computed });
    }
    let grid = GridSpec::new(nx, ny, ntheta)?;
    let mut f = KineticField::zeros(grid, time);
    for (i, v) in f.values.iter_mut().enumerate() {
        *v = f64::from_le_bytes(payload[8 * i..8 * i + 8].try_into().unwrap());
    }
    Ok(f)
}

pub fn write_field(path: &Path, f: &KineticField) -> Result<(), IoError> {
    std::fs::write(path, field_bytes(f))?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<KineticField, IoError> {
    field_from_bytes(&std::fs::read(path)?)
}

/// Writes a CSV table: one header row, then one row per record. Numbers use
/// the shortest decimal form that round-trips exactly.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), IoError> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads a CSV table written by [`write_csv`]: the header verbatim plus each
/// numeric row.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), IoError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(IoError::Csv {
            line: 1,
            reason: "missing header row".to_string(),
        });
    };
    let header: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        rows.push(row.map_err(|e| IoError::Csv {
            line: idx + 1,
            reason: e.to_string(),
        })?);
    }
    Ok((header, rows))
}

/// Writes an energy ledger as a time series: one record per cadence tick with
/// the running inequality sides alongside the raw accumulators.
pub fn write_ledger_csv(path: &Path, ledger: &EnergyLedger) -> Result<(), IoError> {
    let header: Vec<&str> = match ledger.layout() {
        LedgerLayout::Reversal => vec![
            "time",
            "l2_sq",
            "dtheta_sq_cum",
            "reversal_sq_cum",
            "lhs",
            "bound",
        ],
        LedgerLayout::Directional { .. } => vec![
            "time",
            "l2_sq",
            "dtheta_sq_cum",
            "directional_sq_cum",
            "reg_sq_cum",
            "lhs",
            "bound",
        ],
    };
    let lhs = ledger.lhs_series();
    let bound = ledger.bound_series();
    let rows: Vec<Vec<f64>> = (0..ledger.times.len())
        .map(|i| match ledger.layout() {
            LedgerLayout::Reversal => vec![
                ledger.times[i],
                ledger.l2_sq[i],
                ledger.dtheta_sq_cum[i],
                ledger.reversal_sq_cum[i],
                lhs[i],
                bound[i],
            ],
            LedgerLayout::Directional { .. } => vec![
                ledger.times[i],
                ledger.l2_sq[i],
                ledger.dtheta_sq_cum[i],
                ledger.directional_sq_cum[i],
                ledger.reg_sq_cum[i],
                lhs[i],
                bound[i],
            ],
        })
        .collect();
    write_csv(path, &header, &rows)
}

/// Writes a generic (time, value) series.
pub fn write_series_csv(
    path: &Path,
    value_name: &str,
    series: &[(f64, f64)],
) -> Result<(), IoError> {
    let rows: Vec<Vec<f64>> = series.iter().map(|&(t, v)| vec![t, v]).collect();
    write_csv(path, &["time", value_name], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn random_field(seed: u64, nx: usize, ny: usize, nth: usize) -> KineticField {
        let grid = GridSpec::new(nx, ny, nth).unwrap();
        let mut f = KineticField::zeros(grid, 0.625);
        for (i, v) in f.values.iter_mut().enumerate() {
            *v = rng::uniform_symmetric(7, seed, i as u64, 0, 1.0);
        }
        f
    }

    #[test]
    fn round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.bin");
        let f = random_field(3, 6, 4, 8);
        write_field(&path, &f).unwrap();
        let g = read_field(&path).unwrap();
        assert_eq!(g.time.to_bits(), f.time.to_bits());
        assert_eq!(g.grid(), f.grid());
        for (a, b) in f.values.iter().zip(g.values.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn layout_is_orientation_fastest() {
        let f = random_field(9, 4, 4, 6);
        let bytes = field_bytes(&f);
        // Element (ix, iy, k) lives at payload offset ((ix*ny + iy)*nth + k).
        let (ix, iy, k) = (2, 1, 3);
        let off = HEADER_LEN + 8 * ((ix * 4 + iy) * 6 + k);
        let v = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        assert_eq!(v.to_bits(), f.values[[ix, iy, k]].to_bits());
    }

    #[test]
    fn wrong_magic_detected() {
        let f = random_field(1, 4, 4, 4);
        let mut bytes = field_bytes(&f);
        bytes[0] = b'X';
        match field_from_bytes(&bytes) {
            Err(IoError::BadMagic(m)) => assert_eq!(&m[1..], &FIELD_MAGIC[1..]),
            other => panic!("wrong result: {other:?}"),
        }
    }

    #[test]
    fn truncation_detected() {
        let f = random_field(2, 4, 4, 4);
        let bytes = field_bytes(&f);
        match field_from_bytes(&bytes[..bytes.len() - 3]) {
            Err(IoError::Truncated { expected, got }) => {
                assert_eq!(expected, bytes.len());
                assert_eq!(got, bytes.len() - 3);
            }
            other => panic!("wrong result: {other:?}"),
        }
        match field_from_bytes(&bytes[..10]) {
            Err(IoError::Truncated { .. }) => {}
            other => panic!("wrong result: {other:?}"),
        }
    }

    #[test]
    fn payload_corruption_detected() {
        let f = random_field(4, 4, 4, 4);
        let mut bytes = field_bytes(&f);
        let mid = HEADER_LEN + 8 * 11;
        bytes[mid] ^= 0x40;
        match field_from_bytes(&bytes) {
            Err(IoError::Checksum { stored, computed }) => assert_ne!(stored, computed),
            other => panic!("wrong result: {other:?}"),
        }
    }

    #[test]
    fn bad_grid_in_header_detected() {
        let f = random_field(5, 4, 4, 4);
        let mut bytes = field_bytes(&f);
        // Declare ntheta = 0: header-invalid before any payload math.
        bytes[13..17].copy_from_slice(&0u32.to_le_bytes());
        assert!(matches!(
            field_from_bytes(&bytes[..HEADER_LEN]),
            Err(IoError::Truncated { .. })
        ));
        // Consistent length but invalid dimension → grid error.
        bytes.truncate(HEADER_LEN);
        bytes.extend_from_slice(&fnv1a(&[]).to_le_bytes());
        assert!(matches!(field_from_bytes(&bytes), Err(IoError::Grid(_))));
    }

    #[test]
    fn fnv1a_reference_values() {
        // Standard FNV-1a test vectors.
        assert_eq!(fnv1a(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a(b"a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn csv_round_trip_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let rows = vec![
            vec![0.1, 1.0 / 3.0, f64::NAN],
            vec![1e-300, -2.5e17, 0.0],
        ];
        write_csv(&path, &["a", "b", "c"], &rows).unwrap();
        let (header, back) = read_csv(&path).unwrap();
        assert_eq!(header, vec!["a", "b", "c"]);
        assert_eq!(back.len(), 2);
        for (r, br) in rows.iter().zip(back.iter()) {
            for (v, bv) in r.iter().zip(br.iter()) {
                assert!(v.to_bits() == bv.to_bits() || (v.is_nan() && bv.is_nan()));
            }
        }
    }

    #[test]
    fn empty_ledger_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.csv");
        let ledger = EnergyLedger::new(LedgerLayout::Reversal);
        write_ledger_csv(&path, &ledger).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("time,"));
    }

    #[test]
    fn two_tick_ledger_writes_three_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.csv");
        let f = random_field(6, 4, 4, 8);
        let mut ledger = EnergyLedger::new(LedgerLayout::Reversal);
        ledger.record_field(&f);
        let mut g = f.clone();
        g.time = 1.0;
        ledger.record_field(&g);
        write_ledger_csv(&path, &ledger).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        let (_, rows) = read_csv(&path).unwrap();
        assert_eq!(rows[0][0], 0.625);
        assert_eq!(rows[1][0], 1.0);
    }

    #[test]
    fn series_csv_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mass.csv");
        write_series_csv(&path, "mass", &[(0.0, 1.0), (0.5, 1.0)]).unwrap();
        let (header, rows) = read_csv(&path).unwrap();
        assert_eq!(header, vec!["time", "mass"]);
        assert_eq!(rows.len(), 2);
    }
}
