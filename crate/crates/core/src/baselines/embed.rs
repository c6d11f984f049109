use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::features::words;
use crate::error::{Error, Result};

/// Word vectors stored as one contiguous `f32` matrix.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingTable {
    dim: usize,
    index: HashMap<String, usize>,
    data: Vec<f32>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("embedding dimension must be positive".into()));
        }
        Ok(Self { dim, ..Self::default() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Adds a vector; an existing word keeps its first vector.
    pub fn insert(&mut self, word: &str, vector: &[f32]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, actual: vector.len() });
        }
        if !self.index.contains_key(word) {
            self.index.insert(word.to_owned(), self.index.len());
            self.data.extend_from_slice(vector);
        }
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.row(word).map(|r| &self.data[r * self.dim..(r + 1) * self.dim])
    }

    fn row(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Exact lookup with a lowercase fallback.
    fn lookup(&self, word: &str) -> Option<usize> {
        self.row(word).or_else(|| self.row(&word.to_lowercase()))
    }

    /// Reads the text format: a `count dim` header, then `word v1 .. vdim`
    /// per line.
    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(BufReader::new(f), None)
    }

    /// Like [`load`](Self::load) but keeps only words in `keep` (and their
    /// lowercase forms), which bounds memory for large vector files.
    pub fn load_filtered(path: &Path, keep: &HashSet<String>) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut keep = keep.clone();
        keep.extend(keep.iter().map(|w| w.to_lowercase()).collect::<Vec<_>>());
        Self::from_reader(BufReader::new(f), Some(&keep))
    }

    pub fn from_reader<R: BufRead>(reader: R, keep: Option<&HashSet<String>>) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| Error::parse(1, "missing `count dim` header"))??;
        let mut head = header.split_whitespace().map(str::parse::<usize>);
        let (count, dim) = match (head.next(), head.next(), head.next()) {
            (Some(Ok(c)), Some(Ok(d)), None) => (c, d),
            _ => return Err(Error::parse(1, format!("expected `count dim`, got {header:?}"))),
        };
        let mut table = Self::new(dim)?;
        let mut buf = Vec::with_capacity(dim);
        let mut rows = 0;
        for (n, line) in lines.enumerate() {
            let line = line?;
            let lineno = n + 2;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            rows += 1;
            let mut parts = line.split(' ');
            let word = parts.next().unwrap_or_default();
            if let Some(keep) = keep {
                if !keep.contains(word) {
                    continue;
                }
            }
            buf.clear();
            for p in parts.filter(|p| !p.is_empty()) {
                let v: f32 = p.parse().map_err(|_| Error::parse(lineno, format!("bad number {p:?}")))?;
                if !v.is_finite() {
                    return Err(Error::parse(lineno, "non-finite vector component"));
                }
                buf.push(v);
            }
            if buf.len() != dim {
                return Err(Error::parse(lineno, format!("expected {dim} components, got {}", buf.len())));
            }
            table.insert(word, &buf)?;
        }
        if rows != count {
            log::warn!("embedding header announces {count} vectors, file has {rows}");
        }
        Ok(table)
    }
}

/// Mean of the vectors of in-vocabulary words; the zero vector when no word
/// is known.
///
/// Rows are summed in table order, so the result does not depend on word
/// order even in floating point.
pub fn avg_embed(text: &str, table: &EmbeddingTable) -> Vec<f64> {
    let mut rows: Vec<usize> = words(text).filter_map(|w| table.lookup(w)).collect();
    let mut out = vec![0.0; table.dim];
    if rows.is_empty() {
        log::debug!("no known words in {text:?}; using the zero vector");
        return out;
    }
    rows.sort_unstable();
    for &r in &rows {
        for (o, &v) in out.iter_mut().zip(&table.data[r * table.dim..(r + 1) * table.dim]) {
            *o += f64::from(v);
        }
    }
    let n = rows.len() as f64;
    out.iter_mut().for_each(|o| *o /= n);
    out
}
