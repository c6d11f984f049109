//! Web-corpus preparation: cleaning, sentence segmentation, language
//! filtering and exact deduplication.

mod clean;
mod dedup;
mod langid;
mod segment;

use std::collections::HashSet;
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use clean::{
    clean_text, reduce_elongated_punct, remove_braced_content, replace_urls_emails,
    strip_markdown, CleanDocument, CleanStep, EMAIL_TOKEN, URL_TOKEN,
};
pub use dedup::{dedup, dedup_stream, dedup_to_writer, DedupConfig, DedupCounts, SentenceStream};
pub use langid::{score_language, LanguageProfile, DEFAULT_THRESHOLD};
pub use segment::segment_sentences;

use crate::error::{Error, Result};

/// One crawled page as stored in the JSON-lines input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    #[serde(default)]
    pub title: String,
    #[serde(rename = "text")]
    pub body: String,
    pub source_id: String,
}

impl RawDocument {
    /// Title and body joined by a line break (a hard sentence boundary).
    pub fn full_text(&self) -> String {
        if self.title.trim().is_empty() {
            self.body.clone()
        } else {
            format!("{}\n{}", self.title, self.body)
        }
    }
}

/// Reads JSON-lines documents, rejecting duplicate `source_id`s.
pub fn read_documents<R: BufRead>(reader: R) -> Result<Vec<RawDocument>> {
    let mut docs = Vec::new();
    let mut ids = HashSet::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: RawDocument = serde_json::from_str(&line)
            .map_err(|e| Error::parse(n + 1, format!("invalid document: {e}")))?;
        if !ids.insert(doc.source_id.clone()) {
            return Err(Error::parse(
                n + 1,
                format!("duplicate source_id `{}`", doc.source_id),
            ));
        }
        docs.push(doc);
    }
    Ok(docs)
}

/// Language filter applied to cleaned documents.
#[derive(Debug, Clone)]
pub struct LanguageFilter {
    pub profile: LanguageProfile,
    pub threshold: f64,
}

/// Counters reported by the `stats` command.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub bytes_in: u64,
    pub bytes_out: u64,
    pub documents: u64,
    pub documents_rejected: u64,
    pub sentences_total: u64,
    pub sentences_unique: u64,
}

/// Cleans and segments documents in parallel; sentence order follows
/// document order. Returns the sentences plus byte/document counters
/// (dedup counters are left at zero).
pub fn clean_and_segment(
    docs: &[RawDocument],
    steps: &[CleanStep],
    filter: Option<&LanguageFilter>,
    jobs: usize,
) -> Result<(Vec<String>, CorpusStats)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let per_doc: Vec<Option<Vec<String>>> = pool.install(|| {
        docs.par_iter()
            .map(|doc| {
                let cleaned = clean_text(&doc.full_text(), steps);
                if let Some(f) = filter {
                    if !f.profile.accepts(&cleaned.text, f.threshold) {
                        return None;
                    }
                }
                Some(segment_sentences(&cleaned.text))
            })
            .collect()
    });
    let mut stats = CorpusStats {
        documents: docs.len() as u64,
        bytes_in: docs.iter().map(|d| (d.title.len() + d.body.len()) as u64).sum(),
        ..Default::default()
    };
    let mut sentences = Vec::new();
    for doc in per_doc {
        match doc {
            Some(s) => sentences.extend(s),
            None => stats.documents_rejected += 1,
        }
    }
    stats.sentences_total = sentences.len() as u64;
    stats.bytes_out = sentences.iter().map(|s| s.len() as u64 + 1).sum();
    Ok((sentences, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_documents() {
        let input = r#"{"title":"Titul","text":"Telo. Druhá veta!!","source_id":"1"}

{"title":"","text":"pozri www.sme.sk","source_id":"2"}
"#;
        let docs = read_documents(input.as_bytes()).unwrap();
        assert_eq!(docs.len(), 2);
        let (sentences, stats) = clean_and_segment(&docs, &CleanStep::ALL, None, 2).unwrap();
        assert_eq!(sentences, ["Titul", "Telo.", "Druhá veta!", "pozri <url>"]);
        assert_eq!(stats.documents, 2);
        assert_eq!(stats.sentences_total, 4);
    }

    #[test]
    fn duplicate_source_id() {
        let input = "{\"text\":\"a\",\"source_id\":\"x\"}\n{\"text\":\"b\",\"source_id\":\"x\"}\n";
        let err = read_documents(input.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn language_filter_rejects() {
        let profile = LanguageProfile::from_texts("sk", ["toto je slovenský text o počasí"]).unwrap();
        let docs = vec![
            RawDocument { title: String::new(), body: "toto je text o počasí".into(), source_id: "a".into() },
            RawDocument { title: String::new(), body: "qqqq zzzz xxxx".into(), source_id: "b".into() },
        ];
        let filter = LanguageFilter { profile, threshold: DEFAULT_THRESHOLD };
        let (sentences, stats) = clean_and_segment(&docs, &[], Some(&filter), 1).unwrap();
        assert_eq!(sentences, ["toto je text o počasí"]);
        assert_eq!(stats.documents_rejected, 1);
    }
}
