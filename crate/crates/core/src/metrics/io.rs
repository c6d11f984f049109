use std::io::BufRead;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Deserialize)]
struct PredictionRecord {
    id: serde_json::Value,
    label: String,
}

/// Reads `(id, label)` predictions from JSON-lines (`{"id":..,"label":..}`)
/// or TSV (`id<TAB>label`). The format is chosen per line.
pub fn read_label_predictions<R: BufRead>(reader: R) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if line.trim_start().starts_with('{') {
            let rec: PredictionRecord = serde_json::from_str(line)
                .map_err(|e| Error::parse(n + 1, format!("invalid prediction: {e}")))?;
            let id = match rec.id {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            out.push((id, rec.label));
        } else {
            let (id, label) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(n + 1, "expected `id<TAB>label`"))?;
            out.push((id.to_owned(), label.to_owned()));
        }
    }
    Ok(out)
}

/// Reads per-token tags grouped into sentences by blank lines. A line is
/// either a bare tag or `token<TAB>tag`; the last field is the tag.
pub fn read_token_predictions<R: BufRead>(reader: R) -> Result<Vec<Vec<String>>> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        let tag = line.rsplit('\t').next().unwrap_or(line).trim();
        current.push(tag.to_owned());
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}
