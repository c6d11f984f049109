use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{words, SparseVec};
use crate::error::{Error, Result};

/// Word n-gram TF-IDF vectorizer.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "TfidfParts", into = "TfidfParts")]
pub struct TfidfModel {
    ngram_range: (usize, usize),
    features: Vec<String>,
    idf: Vec<f64>,
    index: HashMap<String, u32>,
}

#[derive(Serialize, Deserialize)]
struct TfidfParts {
    ngram_range: (usize, usize),
    features: Vec<String>,
    idf: Vec<f64>,
}

impl From<TfidfParts> for TfidfModel {
    fn from(p: TfidfParts) -> Self {
        let index = p.features.iter().enumerate().map(|(i, f)| (f.clone(), i as u32)).collect();
        Self { ngram_range: p.ngram_range, features: p.features, idf: p.idf, index }
    }
}

impl From<TfidfModel> for TfidfParts {
    fn from(m: TfidfModel) -> Self {
        Self { ngram_range: m.ngram_range, features: m.features, idf: m.idf }
    }
}

fn ngrams(text: &str, (lo, hi): (usize, usize), mut emit: impl FnMut(String)) {
    let toks: Vec<String> = words(text).map(str::to_lowercase).collect();
    for n in lo..=hi {
        for window in toks.windows(n) {
            emit(window.join(" "));
        }
    }
}

/// Fits the vocabulary and `idf = ln((1+N)/(1+df)) + 1`; n-grams with
/// document frequency below `min_count` are dropped. Columns follow the
/// lexicographic order of the n-grams.
pub fn tfidf_fit<S: AsRef<str>>(texts: &[S], ngram_range: (usize, usize), min_count: usize) -> Result<TfidfModel> {
    let (lo, hi) = ngram_range;
    if lo == 0 || lo > hi {
        return Err(Error::Config(format!("invalid n-gram range ({lo}, {hi})")));
    }
    if texts.is_empty() {
        return Err(Error::Training("cannot fit TF-IDF on an empty corpus".into()));
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for t in texts {
        let mut seen: Vec<String> = Vec::new();
        ngrams(t.as_ref(), ngram_range, |g| seen.push(g));
        seen.sort_unstable();
        seen.dedup();
        for g in seen {
            *df.entry(g).or_default() += 1;
        }
    }
    let n = texts.len() as f64;
    let (features, idf): (Vec<String>, Vec<f64>) = df
        .into_iter()
        .filter(|&(_, d)| d >= min_count)
        .map(|(g, d)| (g, ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0))
        .unzip();
    if features.is_empty() {
        return Err(Error::Training(format!("empty feature space (no n-gram reaches min_count {min_count})")));
    }
    Ok(TfidfParts { ngram_range, features, idf }.into())
}

impl TfidfModel {
    pub fn ngram_range(&self) -> (usize, usize) {
        self.ngram_range
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn column(&self, ngram: &str) -> Option<usize> {
        self.index.get(ngram).map(|&i| i as usize)
    }

    /// Raw counts times idf, L2-normalized. Unknown n-grams are ignored and a
    /// text without known n-grams maps to the zero vector.
    pub fn transform(&self, text: &str) -> SparseVec {
        let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
        ngrams(text, self.ngram_range, |g| {
            if let Some(&c) = self.index.get(&g) {
                *counts.entry(c).or_default() += 1.0;
            }
        });
        let mut v = SparseVec {
            indices: counts.keys().copied().collect(),
            values: counts.iter().map(|(&c, tf)| tf * self.idf[c as usize]).collect(),
        };
        let norm = v.norm();
        if norm > 0.0 {
            v.values.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_vec(self)?;
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let m: TfidfModel = serde_json::from_slice(&bytes)?;
        if m.features.len() != m.idf.len() || m.index.len() != m.features.len() {
            return Err(Error::Validation(format!("{}: inconsistent TF-IDF vocabulary", path.display())));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idf_values() {
        let m = tfidf_fit(&["pes mačka", "pes"], (1, 1), 1).unwrap();
        assert_eq!(m.idf()[m.column("pes").unwrap()], 1.0);
        assert!((m.idf()[m.column("mačka").unwrap()] - ((1.5f64).ln() + 1.0)).abs() < 1e-15);
        assert!(m.idf().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn min_count_filters() {
        let m = tfidf_fit(&["a b", "a c"], (1, 2), 2).unwrap();
        assert_eq!(m.features(), ["a"]);
        let err = tfidf_fit(&["a b", "c d"], (1, 1), 3).unwrap_err();
        assert!(err.to_string().contains("empty feature space"));
        assert!(tfidf_fit::<&str>(&[], (1, 1), 1).is_err());
        assert!(tfidf_fit(&["a"], (2, 1), 1).is_err());
    }

    #[test]
    fn bigrams_included() {
        let m = tfidf_fit(&["Dobrý deň.", "dobrý deň"], (1, 2), 1).unwrap();
        assert_eq!(m.features(), ["deň", "dobrý", "dobrý deň"]);
    }

    #[test]
    fn transform_cases() {
        let m = tfidf_fit(&["a b c", "a b", "a"], (1, 1), 1).unwrap();
        assert_eq!(m.transform("zzz").nnz(), 0);
        let once = m.transform("b");
        let many = m.transform("b b b");
        assert_eq!(once, many);
        // hand computation: idf(a)=1, idf(b)=ln(4/3)+1, idf(c)=ln(2)+1, doc "a b b c"
        let (ia, ib, ic) = (1.0, (4.0f64 / 3.0).ln() + 1.0, 2f64.ln() + 1.0);
        let raw = [ia, 2.0 * ib, ic];
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v = m.transform("a b b c q");
        assert_eq!(v.indices, [0, 1, 2]);
        for (got, want) in v.values.iter().zip(raw) {
            assert!((got - want / norm).abs() < 1e-15);
        }
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let m = tfidf_fit(&["a b c", "a b"], (1, 2), 1).unwrap();
        let p = dir.path().join("tfidf.json");
        m.save(&p).unwrap();
        let back = TfidfModel::load(&p).unwrap();
        assert_eq!(back.transform("a b"), m.transform("a b"));
    }
}
