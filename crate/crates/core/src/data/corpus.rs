//! Corpus files: one `label,text` record per line, no header row.
//!
//! Text fields holding commas, quotes, or newlines are double-quoted in the
//! usual CSV way. Labels are 0-based class indices.

use std::path::Path;

use crate::error::{Error, Result};

/// Loads every (label, text) row. Empty files are rejected: a corpus with no
/// examples cannot train anything.
pub fn load_corpus(path: &Path) -> Result<Vec<(usize, String)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => {
                Error::io(path, std::io::Error::new(std::io::ErrorKind::Other, e))
            }
            _ => Error::parse(path, 0, e.to_string()),
        })?;

    let mut examples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(Error::parse(
                path,
                line,
                format!("expected 2 fields (label, text), found {}", record.len()),
            ));
        }
        let label: usize = record[0].trim().parse().map_err(|_| {
            Error::parse(path, line, format!("label {:?} is not a non-negative integer", &record[0]))
        })?;
        examples.push((label, record[1].to_owned()));
    }
    if examples.is_empty() {
        return Err(Error::Input(format!(
            "corpus {} holds no examples",
            path.display()
        )));
    }
    Ok(examples)
}

pub fn save_corpus(path: &Path, examples: &[(usize, String)]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::new(std::io::ErrorKind::Other, e)))?;
    for (label, text) in examples {
        writer
            .write_record([label.to_string().as_str(), text])
            .map_err(|e| Error::io(path, std::io::Error::new(std::io::ErrorKind::Other, e)))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path, e))
}
