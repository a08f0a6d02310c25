use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::de::DeserializeOwned;

/// Input that violates a file format; reported with exit status 2.
#[derive(Debug, thiserror::Error)]
#[error("{path}{}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
pub struct Malformed {
    pub path: String,
    pub line: Option<usize>,
    pub message: String,
}

impl Malformed {
    pub fn new(path: &Path, line: usize, message: impl ToString) -> Self {
        Malformed {
            path: path.display().to_string(),
            line: Some(line),
            message: message.to_string(),
        }
    }

    /// Dataset errors already carry the line for JSON failures.
    pub fn dataset(path: &Path, line: usize, e: asmsearch::dataset::DatasetError) -> Self {
        match e {
            asmsearch::dataset::DatasetError::Json { message, .. } => Malformed::new(path, line, message),
            other => Malformed::new(path, line, other),
        }
    }

    /// A binary file, where line numbers do not apply.
    pub fn binary(path: &Path, message: impl ToString) -> Self {
        Malformed {
            path: path.display().to_string(),
            line: None,
            message: message.to_string(),
        }
    }
}

pub fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

/// Non-blank lines with 1-based line numbers, in chunks of at most `chunk`.
pub struct LineChunks {
    lines: io::Lines<BufReader<File>>,
    next_line: usize,
    chunk: usize,
    path: PathBuf,
}

impl LineChunks {
    pub fn new(path: &Path, chunk: usize) -> anyhow::Result<Self> {
        Ok(LineChunks {
            lines: open(path)?.lines(),
            next_line: 0,
            chunk,
            path: path.to_path_buf(),
        })
    }
}

impl Iterator for LineChunks {
    type Item = anyhow::Result<Vec<(usize, String)>>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut out = Vec::new();
        while out.len() < self.chunk {
            match self.lines.next() {
                None => break,
                Some(Err(e)) => {
                    return Some(Err(Malformed::new(&self.path, self.next_line + 1, e).into()));
                }
                Some(Ok(line)) => {
                    self.next_line += 1;
                    if !line.trim().is_empty() {
                        out.push((self.next_line, line));
                    }
                }
            }
        }
        (!out.is_empty()).then_some(Ok(out))
    }
}

pub fn parse_line<T: DeserializeOwned>(path: &Path, line: usize, text: &str) -> Result<T, Malformed> {
    serde_json::from_str(text).map_err(|e| Malformed::new(path, line, e))
}

/// Whole JSON-lines file, each record paired with its line number.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for chunk in LineChunks::new(path, usize::MAX)? {
        for (line, text) in chunk? {
            out.push((line, parse_line(path, line, &text)?));
        }
    }
    Ok(out)
}

pub fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json_line<T: serde::Serialize>(w: &mut dyn Write, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}
