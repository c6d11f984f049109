use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper end of the raw similarity scale ("completely equivalent").
pub const STS_MAX_SCORE: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StsPair {
    pub sentence_a: String,
    pub sentence_b: String,
    pub score_raw: f64,
    /// `score_raw / 5`, comparable with cosine similarities.
    pub score: f64,
}

impl StsPair {
    pub fn new(sentence_a: String, sentence_b: String, score_raw: f64) -> Result<Self> {
        if !(0.0..=STS_MAX_SCORE).contains(&score_raw) {
            return Err(Error::Validation(format!(
                "similarity score {score_raw} outside the 0-5 scale"
            )));
        }
        Ok(Self {
            sentence_a,
            sentence_b,
            score_raw,
            score: normalize_score(score_raw),
        })
    }
}

pub fn normalize_score(raw: f64) -> f64 {
    raw / STS_MAX_SCORE
}

pub fn denormalize_score(score: f64) -> f64 {
    score * STS_MAX_SCORE
}

/// Parses `sentence_a<TAB>sentence_b<TAB>score` lines.
pub fn read_sts_from<R: BufRead>(reader: R) -> Result<Vec<StsPair>> {
    let mut pairs = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [a, b, score] = fields.as_slice() else {
            return Err(Error::parse(n + 1, format!("expected 3 tab-separated fields, found {}", fields.len())));
        };
        let raw: f64 = score
            .trim()
            .parse()
            .map_err(|_| Error::parse(n + 1, format!("invalid score `{score}`")))?;
        let pair = StsPair::new((*a).to_owned(), (*b).to_owned(), raw).map_err(|e| match e {
            Error::Validation(m) => Error::Validation(format!("line {}: {m}", n + 1)),
            other => other,
        })?;
        pairs.push(pair);
    }
    Ok(pairs)
}

pub fn read_sts(path: &Path) -> Result<Vec<StsPair>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_sts_from(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn normalization_endpoints() {
        let pairs = read_sts_from("a\tb\t5\nc\td\t0\ne\tf\t2.5\n".as_bytes()).unwrap();
        let scores: Vec<f64> = pairs.iter().map(|p| p.score).collect();
        assert_eq!(scores, [1.0, 0.0, 0.5]);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(read_sts_from("a\tb\t5.5\n".as_bytes()), Err(Error::Validation(_))));
        assert!(matches!(read_sts_from("a\tb\t-0.1\n".as_bytes()), Err(Error::Validation(_))));
        assert!(matches!(read_sts_from("a\tb\n".as_bytes()), Err(Error::Parse { line: Some(1), .. })));
        assert!(matches!(read_sts_from("a\tb\tnan\n".as_bytes()), Err(Error::Validation(_))));
    }

    proptest! {
        #[test]
        fn normalization_round_trip(raw in 0.0f64..=5.0) {
            prop_assert!((denormalize_score(normalize_score(raw)) - raw).abs() <= 1e-12);
        }
    }
}
