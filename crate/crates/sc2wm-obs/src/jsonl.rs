//! JSON Lines helpers with per-line error locators, shared by every corpus
//! reader and writer in the workspace.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("line {line}: {source}")]
    Decode {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("record {index}: {source}")]
    Encode {
        index: usize,
        #[source]
        source: serde_json::Error,
    },
}

impl JsonlError {
    /// 1-based locator of the first failing record, when decoding.
    pub fn line(&self) -> Option<usize> {
        match self {
            JsonlError::Decode { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Reads every record of a JSON Lines stream. Blank lines are skipped.
pub fn read_jsonl<T: DeserializeOwned>(reader: impl BufRead) -> Result<Vec<T>, JsonlError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|source| JsonlError::Decode {
            line: idx + 1,
            source,
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Writes records as one JSON object per line.
pub fn write_jsonl<T: Serialize>(
    mut writer: impl Write,
    records: impl IntoIterator<Item = T>,
) -> Result<(), JsonlError> {
    for (index, record) in records.into_iter().enumerate() {
        let line = serde_json::to_string(&record)
            .map_err(|source| JsonlError::Encode { index, source })?;
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
