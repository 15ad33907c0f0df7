//! Point-cloud file formats.
//!
//! * CSV with header `x0,...,x{m-1},weight`, one atom per row.
//! * Binary: magic `RSC1`, then little-endian `u32 m`, `u32 N`, and `N × (m+1)`
//!   `f64` values (coordinates followed by the weight, row by row).
//!
//! Floats are written with 17 significant digits, so both formats round-trip
//! bit-exactly.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;

pub const BINARY_MAGIC: &[u8; 4] = b"RSC1";

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(mu: &DiscreteMeasure, out: W) -> Result<()> {
    let mut w = std::io::BufWriter::new(out);
    let m = mu.ambient_dim();
    let header: Vec<String> = (0..m).map(|k| format!("x{k}")).chain(["weight".to_string()]).collect();
    writeln!(w, "{}", header.join(","))?;
    for (i, p) in mu.points().enumerate() {
        let row: Vec<String> = p
            .iter()
            .copied()
            .chain([mu.weight(i)])
            .map(fmt_f64)
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV point cloud. Row numbers in errors are 1-based file lines
/// (the header is line 1).
pub fn read_csv<R: Read>(input: R, intrinsic_dim: usize) -> Result<DiscreteMeasure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let m = parse_header(&headers)?;
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let fallback = i as u64 + 2;
        let record = record.map_err(|e| Error::Parse {
            row: e.position().map_or(fallback, |p| p.line()),
            message: e.to_string(),
        })?;
        let row = record.position().map_or(fallback, |p| p.line());
        if record.len() != m + 1 {
            return Err(Error::Parse {
                row,
                message: format!("expected {} fields, found {}", m + 1, record.len()),
            });
        }
        for (k, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                message: format!("field {} is not a number: {field:?}", k + 1),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    message: format!("field {} is not finite", k + 1),
                });
            }
            if k < m {
                coords.push(v);
            } else if v <= 0.0 {
                return Err(Error::Parse {
                    row,
                    message: format!("weight must be positive, got {v}"),
                });
            } else {
                weights.push(v);
            }
        }
    }
    if weights.is_empty() {
        return Err(Error::Parse {
            row: 2,
            message: "no data rows".into(),
        });
    }
    DiscreteMeasure::new(coords, weights, m, intrinsic_dim)
}

fn parse_header(headers: &csv::StringRecord) -> Result<usize> {
    let fields: Vec<&str> = headers.iter().collect();
    let bad = |message: String| Error::Parse { row: 1, message };
    if fields.len() < 2 || fields.last() != Some(&"weight") {
        return Err(bad("header must be x0,...,x{m-1},weight".into()));
    }
    let m = fields.len() - 1;
    for (k, f) in fields[..m].iter().enumerate() {
        if *f != format!("x{k}") {
            return Err(bad(format!("header column {} should be x{k}, found {f:?}", k + 1)));
        }
    }
    Ok(m)
}

pub fn encode_binary(mu: &DiscreteMeasure) -> Vec<u8> {
    let m = mu.ambient_dim();
    let mut out = Vec::with_capacity(12 + mu.len() * (m + 1) * 8);
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&(m as u32).to_le_bytes());
    out.extend_from_slice(&(mu.len() as u32).to_le_bytes());
    for (i, p) in mu.points().enumerate() {
        for c in p {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out.extend_from_slice(&mu.weight(i).to_le_bytes());
    }
    out
}

pub fn write_binary<W: Write>(mu: &DiscreteMeasure, mut out: W) -> Result<()> {
    out.write_all(&encode_binary(mu))?;
    out.flush()?;
    Ok(())
}

pub fn decode_binary(bytes: &[u8], intrinsic_dim: usize) -> Result<DiscreteMeasure> {
    let bad = |message: &str| Error::Parse {
        row: 0,
        message: message.to_string(),
    };
    if bytes.len() < 12 || &bytes[..4] != BINARY_MAGIC {
        return Err(bad("missing RSC1 magic"));
    }
    let m = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let count = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let expected = m
        .checked_add(1)
        .and_then(|w| w.checked_mul(count))
        .and_then(|v| v.checked_mul(8))
        .ok_or_else(|| bad("size overflow"))?;
    if bytes.len() - 12 != expected {
        return Err(bad("payload length does not match header"));
    }
    let mut coords = Vec::with_capacity(count * m);
    let mut weights = Vec::with_capacity(count);
    for (i, chunk) in bytes[12..].chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().unwrap());
        if i % (m + 1) == m {
            weights.push(v);
        } else {
            coords.push(v);
        }
    }
    DiscreteMeasure::new(coords, weights, m, intrinsic_dim)
}

pub fn read_binary<R: Read>(mut input: R, intrinsic_dim: usize) -> Result<DiscreteMeasure> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    decode_binary(&bytes, intrinsic_dim)
}

/// Reads either format, detected from the leading magic bytes.
pub fn read_path(path: &Path, intrinsic_dim: usize) -> Result<DiscreteMeasure> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(BINARY_MAGIC) {
        decode_binary(&bytes, intrinsic_dim)
    } else {
        read_csv(bytes.as_slice(), intrinsic_dim)
    }
}

/// Writes binary when the extension is `rsc`, CSV otherwise.
pub fn write_path(mu: &DiscreteMeasure, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    if path.extension().is_some_and(|e| e == "rsc") {
        write_binary(mu, file)
    } else {
        write_csv(mu, file)
    }
}
