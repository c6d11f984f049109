//! `vocab.json` + `merges.txt` persistence.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::model::{PreTokenizer, TokenizerModel, WORD_MARKER};

pub const VOCAB_FILE: &str = "vocab.json";
pub const MERGES_FILE: &str = "merges.txt";
const MERGES_HEADER: &str = "#version: 0.2";

impl TokenizerModel {
    /// Writes `vocab.json` (token -> id, in id order) and `merges.txt`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut vocab = Vec::new();
        vocab.push(b'{');
        for (id, token) in self.tokens.iter().enumerate() {
            if id > 0 {
                vocab.push(b',');
            }
            vocab.extend(serde_json::to_vec(token)?);
            write!(vocab, ":{id}")?;
        }
        vocab.extend(b"}\n");
        let vocab_path = dir.join(VOCAB_FILE);
        fs::write(&vocab_path, vocab).map_err(|e| Error::io(&vocab_path, e))?;

        let mut merges = String::from(MERGES_HEADER);
        merges.push('\n');
        for (l, r) in &self.merges {
            merges.push_str(l);
            merges.push(' ');
            merges.push_str(r);
            merges.push('\n');
        }
        let merges_path = dir.join(MERGES_FILE);
        fs::write(&merges_path, merges).map_err(|e| Error::io(&merges_path, e))
    }

    /// Loads a model, detecting byte-level vocabularies by their `Ġ` tokens.
    pub fn load(dir: &Path) -> Result<Self> {
        let (tokens, merges) = read_files(dir)?;
        let byte_level = tokens.iter().any(|t| t.starts_with('Ġ'))
            && !tokens.iter().any(|t| t.starts_with(WORD_MARKER));
        let mode = if byte_level { PreTokenizer::ByteLevel } else { PreTokenizer::Metaspace };
        TokenizerModel::from_parts(tokens, merges, mode)
    }

    pub fn load_with(dir: &Path, pre_tokenizer: PreTokenizer) -> Result<Self> {
        let (tokens, merges) = read_files(dir)?;
        TokenizerModel::from_parts(tokens, merges, pre_tokenizer)
    }
}

fn read_files(dir: &Path) -> Result<(Vec<String>, Vec<(String, String)>)> {
    let vocab_path = dir.join(VOCAB_FILE);
    let raw = fs::read_to_string(&vocab_path).map_err(|e| Error::io(&vocab_path, e))?;
    let map: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&raw)?;
    let mut tokens: Vec<Option<String>> = vec![None; map.len()];
    for (token, id) in map {
        let id = id
            .as_u64()
            .ok_or_else(|| Error::Validation(format!("id of `{token}` is not an integer")))?
            as usize;
        let slot = tokens
            .get_mut(id)
            .ok_or_else(|| Error::Validation(format!("ids are not dense: `{token}` has id {id}")))?;
        if slot.replace(token.clone()).is_some() {
            return Err(Error::Validation(format!("id {id} assigned twice")));
        }
    }
    let tokens: Vec<String> = tokens
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.ok_or_else(|| Error::Validation(format!("id {i} missing from vocabulary"))))
        .collect::<Result<_>>()?;

    let merges_path = dir.join(MERGES_FILE);
    let raw = fs::read_to_string(&merges_path).map_err(|e| Error::io(&merges_path, e))?;
    let mut merges = Vec::new();
    for (n, line) in raw.lines().enumerate() {
        if line.starts_with("#version") || line.is_empty() {
            continue;
        }
        let (l, r) = line
            .split_once(' ')
            .ok_or_else(|| Error::parse(n + 1, format!("merge line `{line}` is not a pair")))?;
        merges.push((l.to_owned(), r.to_owned()));
    }
    Ok((tokens, merges))
}
