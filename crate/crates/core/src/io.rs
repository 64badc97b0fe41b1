//! Field file formats.
//!
//! * **PGM** (`.pgm`): binary `P5` or ASCII `P2`, maxval up to 65535.
//!   Samples map linearly to `[0, 1]`. Written as 8-bit `P5` unless a
//!   16-bit depth is requested; values are clamped to `[0, 1]` first.
//! * **CSV** (`.csv`): one grid row per line, comma separated. Values are
//!   written in shortest round-trip form, so reading back is bit-exact.
//! * **F64RAW** (`.f64`, `.raw`, `.bin`): little-endian `u64` rows, `u64`
//!   cols, then `rows·cols` little-endian `f64` samples in row-major order.
//!
//! PGM width is the number of columns (axis 2), height the number of rows.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldFormat {
    /// Binary PGM with the given maxval (255 or 65535).
    Pgm {
        maxval: u16,
    },
    Csv,
    F64Raw,
}

impl FieldFormat {
    /// Picks a format from the file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("pgm") => Ok(FieldFormat::Pgm { maxval: 255 }),
            Some("csv") => Ok(FieldFormat::Csv),
            Some("f64" | "raw" | "bin") => Ok(FieldFormat::F64Raw),
            _ => Err(Error::Format(format!(
                "cannot infer field format of {} (expected .pgm, .csv, .f64, .raw or .bin)",
                path.display()
            ))),
        }
    }
}

pub fn read_field(path: &Path, h: f64) -> Result<ScalarField> {
    let bytes = fs::read(path)?;
    let field = match FieldFormat::from_path(path)? {
        FieldFormat::Pgm { .. } => decode_pgm(&bytes, h),
        FieldFormat::Csv => decode_csv(&bytes, h),
        FieldFormat::F64Raw => decode_raw(&bytes, h),
    };
    field.map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Writes `field` in the format implied by the extension.
pub fn write_field(path: &Path, field: &ScalarField) -> Result<()> {
    write_field_as(path, field, FieldFormat::from_path(path)?)
}

pub fn write_field_as(path: &Path, field: &ScalarField, format: FieldFormat) -> Result<()> {
    let bytes = match format {
        FieldFormat::Pgm { maxval } => encode_pgm(field, maxval)?,
        FieldFormat::Csv => encode_csv(field),
        FieldFormat::F64Raw => encode_raw(field),
    };
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows < 2 || cols < 2 {
        return Err(fmt_err(format!(
            "field must be at least 2×2, got {rows}×{cols}"
        )));
    }
    Ok(())
}

pub fn encode_csv(field: &ScalarField) -> Vec<u8> {
    let mut out = String::new();
    for row in field.data().chunks(field.cols()) {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn decode_csv(bytes: &[u8], h: f64) -> Result<ScalarField> {
    let text = std::str::from_utf8(bytes).map_err(|_| fmt_err("CSV is not valid UTF-8"))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| fmt_err(format!("line {}: {e}", lineno + 1)))?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(fmt_err(format!(
                    "line {}: expected {} values, found {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    check_dims(rows.len(), cols)?;
    Ok(ScalarField::from_rows(h, &rows))
}

pub fn encode_raw(field: &ScalarField) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * field.len());
    out.extend_from_slice(&(field.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(field.cols() as u64).to_le_bytes());
    for x in field.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode_raw(bytes: &[u8], h: f64) -> Result<ScalarField> {
    if bytes.len() < 16 {
        return Err(fmt_err("raw field shorter than its 16-byte header"));
    }
    let word = |k: usize| u64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().unwrap());
    let (rows, cols) = (word(0) as usize, word(1) as usize);
    check_dims(rows, cols)?;
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(16));
    if expected != Some(bytes.len()) {
        return Err(fmt_err(format!(
            "raw field header says {rows}×{cols} but payload is {} bytes",
            bytes.len() - 16
        )));
    }
    let data = bytes[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(ScalarField::from_vec(rows, cols, h, data))
}

pub fn encode_pgm(field: &ScalarField, maxval: u16) -> Result<Vec<u8>> {
    if maxval == 0 {
        return Err(fmt_err("PGM maxval must be positive"));
    }
    let mut out = format!("P5\n{} {}\n{}\n", field.cols(), field.rows(), maxval).into_bytes();
    let scale = maxval as f64;
    for &x in field.data() {
        let q = (x.clamp(0.0, 1.0) * scale).round() as u16;
        if maxval < 256 {
            out.push(q as u8);
        } else {
            out.extend_from_slice(&q.to_be_bytes());
        }
    }
    Ok(out)
}

/// Header tokens with `#` comments stripped; returns the tokens and the
/// offset just past the single whitespace byte that ends the header.
fn pgm_header(bytes: &[u8], count: usize) -> Result<(Vec<String>, usize)> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    while tokens.len() < count {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(fmt_err("truncated PGM header"));
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    Ok((tokens, pos + 1))
}

pub fn decode_pgm(bytes: &[u8], h: f64) -> Result<ScalarField> {
    let (head, body) = pgm_header(bytes, 4)?;
    let magic = head[0].as_str();
    let parse = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| fmt_err(format!("bad PGM {what}: {s:?}")))
    };
    let cols = parse(&head[1], "width")?;
    let rows = parse(&head[2], "height")?;
    let maxval = parse(&head[3], "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(fmt_err(format!("PGM maxval {maxval} out of range")));
    }
    check_dims(rows, cols)?;
    let scale = maxval as f64;
    let n = rows * cols;
    let samples: Vec<f64> = match magic {
        "P5" => {
            let width = if maxval < 256 { 1 } else { 2 };
            let payload = bytes.get(body..).unwrap_or_default();
            if payload.len() < n * width {
                return Err(fmt_err("truncated PGM payload"));
            }
            if width == 1 {
                payload[..n].iter().map(|&b| b as f64 / scale).collect()
            } else {
                payload[..2 * n]
                    .chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / scale)
                    .collect()
            }
        }
        "P2" => {
            let text = String::from_utf8_lossy(bytes.get(body..).unwrap_or_default()).into_owned();
            let values = text
                .lines()
                .map(|l| l.split('#').next().unwrap_or(""))
                .flat_map(str::split_ascii_whitespace)
                .take(n)
                .map(|t| parse(t, "sample").map(|v| v as f64 / scale))
                .collect::<Result<Vec<_>>>()?;
            if values.len() < n {
                return Err(fmt_err("truncated PGM payload"));
            }
            values
        }
        other => return Err(fmt_err(format!("unsupported PGM magic {other:?}"))),
    };
    Ok(ScalarField::from_vec(rows, cols, h, samples))
}
