//! `LREP` tensors: magic, then little-endian u32 version, layer index, rows
//! and cols, then `rows × cols` little-endian `f32` row-major. Token
//! alignment lives in a JSON sidecar next to the tensor.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAGIC: [u8; 4] = *b"LREP";
pub const LREP_VERSION: u32 = 1;
const HEADER_LEN: u64 = 20;
/// Payloads above 16 GiB are treated as corrupt headers.
const MAX_PAYLOAD: u64 = 1 << 34;

/// Sentence and word boundaries over the token rows.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    /// Half-open `[start, end)` token ranges, one per sentence.
    pub sentence_offsets: Vec<[usize; 2]>,
    /// Absolute index of the first token of every word, per sentence.
    pub word_first_token: Vec<Vec<usize>>,
}

impl Alignment {
    /// Checks that the ranges tile `[0, rows)` and every word starts inside
    /// its sentence.
    pub fn validate(&self, rows: usize) -> Result<()> {
        let mut next = 0;
        for (s, &[start, end]) in self.sentence_offsets.iter().enumerate() {
            if start != next || end < start {
                return Err(Error::Validation(format!(
                    "sentence {s} range [{start}, {end}) does not continue at token {next}"
                )));
            }
            next = end;
        }
        if next != rows {
            return Err(Error::Validation(format!("sentence ranges cover {next} of {rows} tokens")));
        }
        if !self.word_first_token.is_empty() && self.word_first_token.len() != self.sentence_offsets.len() {
            return Err(Error::Validation(format!(
                "{} word lists for {} sentences",
                self.word_first_token.len(),
                self.sentence_offsets.len()
            )));
        }
        for (s, firsts) in self.word_first_token.iter().enumerate() {
            let [start, end] = self.sentence_offsets[s];
            if let Some(&bad) = firsts.iter().find(|&&t| t < start || t >= end) {
                return Err(Error::Validation(format!(
                    "sentence {s}: word token {bad} outside [{start}, {end})"
                )));
            }
        }
        Ok(())
    }

    /// Alignment where every sentence has `len` tokens and each token is a word.
    pub fn uniform(sentences: usize, len: usize) -> Self {
        Self {
            sentence_offsets: (0..sentences).map(|s| [s * len, (s + 1) * len]).collect(),
            word_first_token: (0..sentences).map(|s| (s * len..(s + 1) * len).collect()).collect(),
        }
    }

    pub fn word_count(&self) -> usize {
        self.word_first_token.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerTensor {
    pub layer_index: u32,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f32>,
    pub alignment: Alignment,
}

impl LayerTensor {
    pub fn new(layer_index: u32, rows: usize, cols: usize, values: Vec<f32>, alignment: Alignment) -> Result<Self> {
        let t = Self { layer_index, rows, cols, values, alignment };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.rows * self.cols {
            return Err(Error::Dimension { expected: self.rows * self.cols, actual: self.values.len() });
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite value at row {}, column {}",
                i / self.cols.max(1),
                i % self.cols.max(1)
            )));
        }
        self.alignment.validate(self.rows)
    }

    pub fn row(&self, r: usize) -> &[f32] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }
}

/// Serializes the tensor part. Non-finite values are rejected.
pub fn encode_lrep(t: &LayerTensor) -> Result<Vec<u8>> {
    t.validate()?;
    let rows = u32::try_from(t.rows).map_err(|_| Error::Validation(format!("{} rows exceed u32", t.rows)))?;
    let cols = u32::try_from(t.cols).map_err(|_| Error::Validation(format!("{} cols exceed u32", t.cols)))?;
    let mut out = Vec::with_capacity(HEADER_LEN as usize + t.values.len() * 4);
    out.extend_from_slice(&MAGIC);
    for v in [LREP_VERSION, t.layer_index, rows, cols] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in &t.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Parses the tensor part; returns `(layer_index, rows, cols, values)`.
pub fn decode_lrep(bytes: &[u8]) -> Result<(u32, usize, usize, Vec<f32>)> {
    if bytes.len() < HEADER_LEN as usize {
        return Err(Error::Truncated { expected: HEADER_LEN, actual: bytes.len() as u64 });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(Error::BadMagic { expected: MAGIC, found: magic });
    }
    let word = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap());
    let version = word(0);
    if version != LREP_VERSION {
        return Err(Error::UnsupportedVersion { found: version, supported: LREP_VERSION });
    }
    let (layer, rows, cols) = (word(1), word(2), word(3));
    let payload = u64::from(rows)
        .checked_mul(u64::from(cols))
        .and_then(|n| n.checked_mul(4))
        .filter(|&p| p <= MAX_PAYLOAD && usize::try_from(p).is_ok())
        .ok_or(Error::DimensionOverflow { rows, cols })?;
    let expected = HEADER_LEN + payload;
    let actual = bytes.len() as u64;
    if actual < expected {
        return Err(Error::Truncated { expected, actual });
    }
    if actual > expected {
        return Err(Error::Validation(format!("{} trailing bytes after the payload", actual - expected)));
    }
    let values: Vec<f32> = bytes[HEADER_LEN as usize..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!("non-finite value at element {i}")));
    }
    Ok((layer, rows as usize, cols as usize, values))
}

/// `layer_03.lrep` → `layer_03.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes the tensor and its sidecar.
pub fn write_layer_tensor(path: &Path, t: &LayerTensor) -> Result<()> {
    let bytes = encode_lrep(t)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let side = sidecar_path(path);
    fs::write(&side, serde_json::to_vec(&t.alignment)?).map_err(|e| Error::io(&side, e))
}

/// Reads a tensor with its sidecar. Without a per-file sidecar,
/// `alignment.json` in the same directory is used.
pub fn read_layer_tensor(path: &Path) -> Result<LayerTensor> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let (layer_index, rows, cols, values) = decode_lrep(&bytes)?;
    let mut side = sidecar_path(path);
    if !side.exists() {
        side = path.with_file_name("alignment.json");
    }
    let text = fs::read(&side).map_err(|e| Error::io(&side, e))?;
    let alignment: Alignment = serde_json::from_slice(&text)?;
    LayerTensor::new(layer_index, rows, cols, values, alignment)
}

/// All `*.lrep` files of a directory, ordered by layer index.
pub fn read_layer_dir(dir: &Path) -> Result<Vec<LayerTensor>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "lrep"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Validation(format!("no .lrep files in {}", dir.display())));
    }
    let mut layers = paths.iter().map(|p| read_layer_tensor(p)).collect::<Result<Vec<_>>>()?;
    layers.sort_by_key(|t| t.layer_index);
    if let Some(w) = layers.windows(2).find(|w| w[0].layer_index == w[1].layer_index) {
        return Err(Error::Validation(format!("layer {} appears twice in {}", w[0].layer_index, dir.display())));
    }
    Ok(layers)
}
