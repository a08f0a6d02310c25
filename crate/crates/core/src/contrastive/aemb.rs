//! `AEMB` binary embedding files.
//!
//! ```text
//! "AEMB"                    4 bytes
//! version = 1               u8
//! n                         u32 little-endian
//! d                         u32 little-endian
//! n*d values                f32 little-endian, row-major
//! n ids                     UTF-8, each terminated by '\n'
//! ```
//!
//! Readers accept a missing final newline.

use std::io::{self, Read, Write};

use super::{ContrastiveError, EmbeddingMatrix};

pub const AEMB_MAGIC: &[u8; 4] = b"AEMB";
pub const AEMB_VERSION: u8 = 1;

#[derive(Debug, thiserror::Error)]
pub enum AembError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not an AEMB file (bad magic)")]
    BadMagic,
    #[error("unsupported AEMB version {0}")]
    UnsupportedVersion(u8),
    #[error("file truncated while reading {0}")]
    Truncated(&'static str),
    #[error("ids are not valid UTF-8")]
    InvalidUtf8,
    #[error("expected {expected} ids, found {found}")]
    IdCount { expected: usize, found: usize },
    #[error(transparent)]
    Matrix(#[from] ContrastiveError),
}

/// Values are rounded to `f32`.
pub fn write_aemb<W: Write>(mut w: W, m: &EmbeddingMatrix) -> io::Result<()> {
    w.write_all(AEMB_MAGIC)?;
    w.write_all(&[AEMB_VERSION])?;
    w.write_all(&(m.len() as u32).to_le_bytes())?;
    w.write_all(&(m.dim() as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(m.len() * m.dim() * 4);
    for v in &m.values().data {
        buf.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    for id in m.ids() {
        w.write_all(id.as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

fn read_exact_or<R: Read>(r: &mut R, buf: &mut [u8], what: &'static str) -> Result<(), AembError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => AembError::Truncated(what),
        _ => AembError::Io(e),
    })
}

pub fn read_aemb<R: Read>(mut r: R) -> Result<EmbeddingMatrix, AembError> {
    let mut magic = [0u8; 4];
    read_exact_or(&mut r, &mut magic, "magic")?;
    if &magic != AEMB_MAGIC {
        return Err(AembError::BadMagic);
    }
    let mut version = [0u8; 1];
    read_exact_or(&mut r, &mut version, "version")?;
    if version[0] != AEMB_VERSION {
        return Err(AembError::UnsupportedVersion(version[0]));
    }
    let mut word = [0u8; 4];
    read_exact_or(&mut r, &mut word, "row count")?;
    let n = u32::from_le_bytes(word) as usize;
    read_exact_or(&mut r, &mut word, "dimension")?;
    let d = u32::from_le_bytes(word) as usize;

    let mut raw = vec![0u8; n * d * 4];
    read_exact_or(&mut r, &mut raw, "values")?;
    let values: Vec<f64> = raw
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();

    let mut tail = Vec::new();
    r.read_to_end(&mut tail)?;
    let text = String::from_utf8(tail).map_err(|_| AembError::InvalidUtf8)?;
    let body = text.strip_suffix('\n').unwrap_or(&text);
    let ids: Vec<String> = if body.is_empty() && n == 0 {
        Vec::new()
    } else {
        body.split('\n').map(str::to_string).collect()
    };
    if ids.len() != n {
        return Err(AembError::IdCount {
            expected: n,
            found: ids.len(),
        });
    }
    Ok(EmbeddingMatrix::new(ids, d, values)?)
}
