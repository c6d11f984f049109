//! Text classification data: sentiment tweets and news categories.

use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{collapse_whitespace, is_punctuation};

pub const SENTIMENT_LABELS: [&str; 3] = ["negative", "neutral", "positive"];
pub const DOCCLASS_LABELS: [&str; 5] = ["Sports", "Politics", "Economy", "Health", "World"];
/// News category present in the source corpus but excluded from the task.
pub const EXCLUDED_DOCCLASS: &str = "Culture";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassificationTask {
    Sentiment,
    Docclass,
}

impl ClassificationTask {
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            ClassificationTask::Sentiment => &SENTIMENT_LABELS,
            ClassificationTask::Docclass => &DOCCLASS_LABELS,
        }
    }

    /// Maps a raw label to its canonical spelling (case-insensitive).
    pub fn canonical_label(self, raw: &str) -> Option<&'static str> {
        self.labels()
            .iter()
            .copied()
            .find(|l| l.eq_ignore_ascii_case(raw.trim()))
    }
}

impl fmt::Display for ClassificationTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassificationTask::Sentiment => "sentiment",
            ClassificationTask::Docclass => "docclass",
        })
    }
}

impl FromStr for ClassificationTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sentiment" => Ok(Self::Sentiment),
            "docclass" => Ok(Self::Docclass),
            other => Err(Error::Config(format!("unknown classification task `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledText {
    pub text: String,
    pub label: String,
}

impl LabeledText {
    pub fn new(text: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            label: label.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadStats {
    pub read: usize,
    pub excluded: usize,
}

/// Reads `{"text": ..., "label": ...}` lines, validating labels against
/// the task. Culture articles are dropped from the news task and counted.
pub fn read_labeled<R: BufRead>(reader: R, task: ClassificationTask) -> Result<(Vec<LabeledText>, ReadStats)> {
    let mut out = Vec::new();
    let mut stats = ReadStats::default();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: LabeledText = serde_json::from_str(&line)
            .map_err(|e| Error::parse(n + 1, format!("invalid record: {e}")))?;
        stats.read += 1;
        if task == ClassificationTask::Docclass && rec.label.trim().eq_ignore_ascii_case(EXCLUDED_DOCCLASS) {
            stats.excluded += 1;
            continue;
        }
        let label = task.canonical_label(&rec.label).ok_or_else(|| {
            Error::Validation(format!("line {}: label `{}` is not a {task} class", n + 1, rec.label))
        })?;
        out.push(LabeledText::new(rec.text, label));
    }
    if stats.excluded > 0 {
        log::info!("dropped {} {EXCLUDED_DOCCLASS} documents", stats.excluded);
    }
    Ok((out, stats))
}

static TWEET_URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S+").unwrap());
static RETWEET_PREFIX: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*(?:RT\s+@\w+\s*:?\s*)+").unwrap());
static MENTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+").unwrap());

const QUOTES: &[char] = &['"', '“', '”', '„', '‟', '«', '»', '‚', '‘', '’', '\''];

/// Removes URLs, retweet prefixes, hashtag marks, user mentions, quotes
/// and asterisks, collapses whitespace and strips trailing punctuation.
/// Hashtag words are kept. The result may be empty.
pub fn clean_tweet(text: &str) -> String {
    let mut current = text.to_owned();
    loop {
        let next = clean_tweet_pass(&current);
        if next == current {
            return next;
        }
        current = next;
    }
}

fn clean_tweet_pass(text: &str) -> String {
    let t = TWEET_URL.replace_all(text, " ");
    let t = RETWEET_PREFIX.replace(&t, "");
    let t = MENTION.replace_all(&t, " ");
    let t: String = t
        .chars()
        .filter(|c| *c != '#' && *c != '*' && !QUOTES.contains(c))
        .collect();
    let t = collapse_whitespace(&t);
    t.trim_end_matches(|c: char| is_punctuation(c) || c.is_whitespace())
        .to_owned()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDedupStats {
    pub input: usize,
    pub kept: usize,
    /// Duplicates folded into a kept record.
    pub merged: usize,
    /// Records discarded because their group had no majority label.
    pub dropped: usize,
}

/// Collapses byte-identical texts to one record labelled by majority vote.
/// Groups whose top label is tied are dropped entirely. Output follows the
/// order of first occurrence.
pub fn dedup_labeled(samples: &[LabeledText]) -> (Vec<LabeledText>, LabeledDedupStats) {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<&str>> = HashMap::new();
    for s in samples {
        groups
            .entry(&s.text)
            .or_insert_with(|| {
                order.push(&s.text);
                Vec::new()
            })
            .push(&s.label);
    }
    let mut stats = LabeledDedupStats {
        input: samples.len(),
        ..Default::default()
    };
    let mut out = Vec::new();
    for text in order {
        let labels = &groups[text];
        let mut votes: Vec<(&str, usize)> = Vec::new();
        for l in labels {
            match votes.iter_mut().find(|(v, _)| v == l) {
                Some((_, c)) => *c += 1,
                None => votes.push((l, 1)),
            }
        }
        let top = votes.iter().map(|(_, c)| *c).max().unwrap_or(0);
        let winners: Vec<&str> = votes.iter().filter(|(_, c)| *c == top).map(|(l, _)| *l).collect();
        if winners.len() == 1 {
            out.push(LabeledText::new(text, winners[0]));
            stats.kept += 1;
            stats.merged += labels.len() - 1;
        } else {
            stats.dropped += labels.len();
        }
    }
    (out, stats)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn tweet_cleaning() {
        assert_eq!(clean_tweet("RT @jan: Super deň! http://t.co/x"), "Super deň");
        assert_eq!(clean_tweet("čistý text"), "čistý text");
        assert_eq!(clean_tweet("#leto je tu"), "leto je tu");
        assert_eq!(clean_tweet("„Toto“ je *super* @eva ..."), "Toto je super");
        assert_eq!(clean_tweet("RT @a: @b"), "");
    }

    #[test]
    fn dedup_rules() {
        let pos = |t: &str| LabeledText::new(t, "positive");
        let neg = |t: &str| LabeledText::new(t, "negative");
        assert_eq!(dedup_labeled(&[pos("a"), pos("a")]).0, [pos("a")]);
        let (out, stats) = dedup_labeled(&[pos("a"), neg("a")]);
        assert!(out.is_empty());
        assert_eq!(stats.dropped, 2);
        let (out, stats) = dedup_labeled(&[pos("a"), pos("a"), neg("a"), neg("b")]);
        assert_eq!(out, [pos("a"), neg("b")]);
        assert_eq!(stats, LabeledDedupStats { input: 4, kept: 2, merged: 2, dropped: 0 });
    }

    #[test]
    fn reading_labels() {
        let input = r#"{"text":"a","label":"Sports"}
{"text":"b","label":"culture"}
{"text":"c","label":"world"}
"#;
        let (rows, stats) = read_labeled(input.as_bytes(), ClassificationTask::Docclass).unwrap();
        assert_eq!(rows, [LabeledText::new("a", "Sports"), LabeledText::new("c", "World")]);
        assert_eq!(stats, ReadStats { read: 3, excluded: 1 });
        let bad = r#"{"text":"a","label":"happy"}"#;
        assert!(read_labeled(bad.as_bytes(), ClassificationTask::Sentiment).is_err());
    }

    proptest! {
        #[test]
        fn clean_tweet_idempotent(s in r#"(RT |@[a-z]{1,3}|#|\*|"|„|!|\.|:| |x|y|http://a\.b|ó){0,24}"#) {
            let once = clean_tweet(&s);
            prop_assert_eq!(clean_tweet(&once), once);
        }

        #[test]
        fn dedup_accounting(items in proptest::collection::vec((0u8..5, 0u8..3), 0..60)) {
            let samples: Vec<LabeledText> = items
                .iter()
                .map(|(t, l)| LabeledText::new(t.to_string(), SENTIMENT_LABELS[*l as usize]))
                .collect();
            let (out, stats) = dedup_labeled(&samples);
            prop_assert_eq!(stats.kept + stats.merged + stats.dropped, samples.len());
            let mut texts: Vec<&str> = out.iter().map(|s| s.text.as_str()).collect();
            let n = texts.len();
            texts.sort_unstable();
            texts.dedup();
            prop_assert_eq!(texts.len(), n);
        }
    }
}
