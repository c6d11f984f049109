//! Character-trigram language scoring.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Relative trigram frequencies of a reference corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageProfile {
    pub label: String,
    pub trigram_frequencies: HashMap<String, f64>,
}

impl LanguageProfile {
    /// Builds a profile from reference texts. Fails when the texts contain
    /// no trigram at all.
    pub fn from_texts<'a, I>(label: &str, texts: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut counts: HashMap<String, f64> = HashMap::new();
        for text in texts {
            for (tri, n) in trigram_counts(text) {
                *counts.entry(tri).or_default() += n;
            }
        }
        let total: f64 = counts.values().sum();
        if total == 0.0 {
            return Err(Error::Validation(
                "language profile needs at least one text of three or more characters".into(),
            ));
        }
        counts.values_mut().for_each(|v| *v /= total);
        Ok(Self {
            label: label.to_owned(),
            trigram_frequencies: counts,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let profile: Self = serde_json::from_str(&raw)?;
        let sum: f64 = profile.trigram_frequencies.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "profile frequencies in {} sum to {sum}, expected 1",
                path.display()
            )));
        }
        Ok(profile)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_vec(self)?).map_err(|e| Error::io(path, e))
    }

    /// Cosine similarity between the text's trigram vector and this profile.
    /// Texts shorter than three characters score 0.
    pub fn score(&self, text: &str) -> f64 {
        score_language(text, self)
    }

    pub fn accepts(&self, text: &str, threshold: f64) -> bool {
        self.score(text) >= threshold
    }
}

/// Lowercased character trigram counts; whitespace runs count as one space.
fn trigram_counts(text: &str) -> HashMap<String, f64> {
    let chars: Vec<char> = crate::text::collapse_whitespace(&text.to_lowercase())
        .chars()
        .collect();
    let mut counts = HashMap::new();
    for w in chars.windows(3) {
        *counts.entry(w.iter().collect::<String>()).or_insert(0.0) += 1.0;
    }
    counts
}

pub fn score_language(text: &str, profile: &LanguageProfile) -> f64 {
    let counts = trigram_counts(text);
    if counts.is_empty() {
        return 0.0;
    }
    let dot: f64 = counts
        .iter()
        .filter_map(|(t, c)| profile.trigram_frequencies.get(t).map(|p| c * p))
        .sum();
    let norm_text = counts.values().map(|c| c * c).sum::<f64>().sqrt();
    let norm_profile = profile
        .trigram_frequencies
        .values()
        .map(|p| p * p)
        .sum::<f64>()
        .sqrt();
    if norm_profile == 0.0 {
        return 0.0;
    }
    (dot / (norm_text * norm_profile)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SK: &str = "Slovenčina je západoslovanský jazyk, ktorým hovorí viac ako päť miliónov ľudí.";
    const OTHER: &str = "xyzqw vvvv qqqq";

    #[test]
    fn self_similarity() {
        let p = LanguageProfile::from_texts("sk", [SK]).unwrap();
        assert!((p.score(SK) - 1.0).abs() < 1e-9);
        let sum: f64 = p.trigram_frequencies.values().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn disjoint_and_short() {
        let p = LanguageProfile::from_texts("sk", ["aaaa"]).unwrap();
        assert_eq!(p.score("bbbb"), 0.0);
        assert_eq!(p.score("aa"), 0.0);
        assert_eq!(p.score(""), 0.0);
    }

    #[test]
    fn mixed_text_lies_between() {
        let p = LanguageProfile::from_texts("sk", [SK]).unwrap();
        let pure_sk = p.score(SK);
        let pure_other = p.score(OTHER);
        let mixed = p.score(&format!("{SK} {OTHER}"));
        assert!(pure_other < mixed && mixed < pure_sk, "{pure_other} {mixed} {pure_sk}");
    }

    #[test]
    fn empty_profile_rejected() {
        assert!(LanguageProfile::from_texts("sk", ["ab"]).is_err());
    }

    #[test]
    fn save_load() {
        let p = LanguageProfile::from_texts("sk", [SK]).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        p.save(f.path()).unwrap();
        assert_eq!(LanguageProfile::load(f.path()).unwrap().label, "sk");
    }
}
