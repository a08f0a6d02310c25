use std::collections::HashSet;
use std::io::{BufRead, Write};

use super::{DatasetError, PairRecord};

/// Parses one JSON-lines record and checks its line-count invariant.
pub fn parse_record_line(text: &str, line: usize) -> Result<PairRecord, DatasetError> {
    let r: PairRecord = serde_json::from_str(text).map_err(|e| DatasetError::Json {
        line,
        message: e.to_string(),
    })?;
    r.source.check_line_count(&r.id)?;
    Ok(r)
}

/// Reads a corpus, skipping blank lines. Line numbers in errors are 1-based.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<PairRecord>, DatasetError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| DatasetError::Json {
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let r = parse_record_line(&line, i + 1)?;
        if !seen.insert(r.id.clone()) {
            return Err(DatasetError::DuplicateId(r.id));
        }
        out.push(r);
    }
    Ok(out)
}

pub fn write_corpus<W: Write>(mut w: W, records: &[PairRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
