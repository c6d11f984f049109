//! Document cleaning steps: placeholder substitution for URLs and e-mail
//! addresses, punctuation de-elongation, markdown stripping and removal of
//! brace-enclosed spans.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::{Captures, Regex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::is_punctuation;

pub const URL_TOKEN: &str = "<url>";
pub const EMAIL_TOKEN: &str = "<email>";

static URL_OR_EMAIL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r#"(?xi)
        (?P<url>\b(?:https?://|ftp://|www\.)[^\s<>{}\[\]()"'`]+)
        |
        (?P<email>[a-z0-9._%+\-]+@[a-z0-9\-]+(?:\.[a-z0-9\-]+)*\.[a-z]{2,})
        "#,
    )
    .unwrap()
});

/// Characters that end a sentence rather than a URL when they trail it.
const URL_TRAILING: &[char] = &['.', ',', ';', ':', '!', '?'];

/// One step of the cleaning pipeline, listed in pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CleanStep {
    Urls,
    Punct,
    Markdown,
    Braces,
}

impl CleanStep {
    pub const ALL: [CleanStep; 4] = [
        CleanStep::Urls,
        CleanStep::Punct,
        CleanStep::Markdown,
        CleanStep::Braces,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CleanStep::Urls => "urls",
            CleanStep::Punct => "punct",
            CleanStep::Markdown => "markdown",
            CleanStep::Braces => "braces",
        }
    }

    pub fn apply(self, text: &str) -> String {
        match self {
            CleanStep::Urls => replace_urls_emails(text),
            CleanStep::Punct => reduce_elongated_punct(text),
            CleanStep::Markdown => strip_markdown(text),
            CleanStep::Braces => remove_braced_content(text),
        }
    }

    /// Parses a comma-separated step list such as `urls,punct`.
    /// Parses `urls,punct,...`; `all` selects every step and `none` (or an
    /// empty list) none.
    pub fn parse_list(list: &str) -> Result<Vec<CleanStep>> {
        match list.trim() {
            "all" => return Ok(CleanStep::ALL.to_vec()),
            "none" => return Ok(Vec::new()),
            _ => {}
        }
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for CleanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CleanStep {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "urls" | "url" | "emails" => Ok(CleanStep::Urls),
            "punct" | "punctuation" => Ok(CleanStep::Punct),
            "markdown" | "md" => Ok(CleanStep::Markdown),
            "braces" => Ok(CleanStep::Braces),
            other => Err(Error::Config(format!("unknown cleaning step `{other}`"))),
        }
    }
}

/// Cleaned text together with the steps that were run over it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanDocument {
    pub text: String,
    pub applied_steps: Vec<String>,
}

/// Replaces URL-shaped spans with `<url>` and e-mail-shaped spans with `<email>`.
pub fn replace_urls_emails(text: &str) -> String {
    fixpoint(text.to_owned(), |t| {
        URL_OR_EMAIL.replace_all(t, |caps: &Captures<'_>| {
            if let Some(m) = caps.name("url") {
                let raw = m.as_str();
                let body = raw.trim_end_matches(URL_TRAILING);
                let after_scheme = body
                    .find("://")
                    .map(|i| &body[i + 3..])
                    .or_else(|| body.get(4..))
                    .unwrap_or("");
                if after_scheme.is_empty() {
                    raw.to_owned()
                } else {
                    format!("{URL_TOKEN}{}", &raw[body.len()..])
                }
            } else {
                EMAIL_TOKEN.to_owned()
            }
        })
    })
}

/// Collapses every run of two or more identical punctuation characters to one.
pub fn reduce_elongated_punct(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut prev: Option<char> = None;
    for c in text.chars() {
        if prev == Some(c) && is_punctuation(c) {
            continue;
        }
        out.push(c);
        prev = Some(c);
    }
    out
}

struct MarkdownRule {
    pattern: Regex,
    replacement: &'static str,
}

static MARKDOWN_RULES: LazyLock<Vec<MarkdownRule>> = LazyLock::new(|| {
    let rule = |pattern: &str, replacement| MarkdownRule {
        pattern: Regex::new(pattern).unwrap(),
        replacement,
    };
    vec![
        // fenced code block delimiters, including the info string
        rule(r"(?m)^[ \t]*(?:```|~~~)[^\n]*$", ""),
        // horizontal rules
        rule(r"(?m)^[ \t]*(?:(?:-[ \t]*){3,}|(?:\*[ \t]*){3,}|(?:_[ \t]*){3,})$", ""),
        // inline and reference links, images
        rule(r"!?\[([^\]\n]*)\]\([^)\n]*\)", "$1"),
        rule(r"!?\[([^\]\n]*)\]\[[^\]\n]*\]", "$1"),
        // headings, block quotes and bullets at line start
        rule(r"(?m)^[ \t]*(?:(?:#{1,6}|>|[-*+])[ \t]+)+", ""),
        rule(r"(?m)^[ \t]*>", ""),
        // emphasis
        rule(r"\*\*([^*\s](?:[^*\n]*?[^*\s])?)\*\*", "$1"),
        rule(r"__([^_\s](?:[^_\n]*?[^_\s])?)__", "$1"),
        rule(r"\*([^*\s](?:[^*\n]*?[^*\s])?)\*", "$1"),
        rule(r"(^|[^\w])_([^_\s](?:[^_\n]*?[^_\s])?)_([^\w]|$)", "$1$2$3"),
        rule(r"~~([^~\n]+?)~~", "$1"),
        // inline code
        rule(r"`+([^`\n]+?)`+", "$1"),
    ]
});

/// Removes markdown markers while keeping the visible text.
///
/// Link text is kept and link targets are dropped. Rules are re-applied
/// until nothing changes, so markers uncovered by an earlier removal are
/// stripped as well.
pub fn strip_markdown(text: &str) -> String {
    fixpoint(text.to_owned(), |t| {
        let mut current = Cow::Borrowed(t);
        for rule in MARKDOWN_RULES.iter() {
            if let Cow::Owned(s) = rule.pattern.replace_all(&current, rule.replacement) {
                current = Cow::Owned(s);
            }
        }
        current
    })
}

/// Deletes every `{...}` span, braces included.
///
/// Nested spans are removed up to the outermost matching pair. Braces with
/// no partner are deleted on their own and the text around them is kept.
pub fn remove_braced_content(text: &str) -> String {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut open = Vec::new();
    // (start, end) char positions of matched pairs, closed in order
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut lone = vec![false; chars.len()];
    for (pos, &(_, c)) in chars.iter().enumerate() {
        match c {
            '{' => open.push(pos),
            '}' => match open.pop() {
                Some(start) => {
                    while spans.last().is_some_and(|&(s, _)| s > start) {
                        spans.pop();
                    }
                    spans.push((start, pos));
                }
                None => lone[pos] = true,
            },
            _ => {}
        }
    }
    for pos in open {
        lone[pos] = true;
    }
    let mut deleted = lone;
    for (start, end) in spans {
        deleted[start..=end].iter_mut().for_each(|d| *d = true);
    }
    chars
        .iter()
        .zip(deleted)
        .filter(|(_, d)| !d)
        .map(|(&(_, c), _)| c)
        .collect()
}

/// Runs the selected steps in pipeline order until the text is stable.
///
/// Steps are always applied in the order URL/e-mail, punctuation,
/// markdown, braces regardless of the order in `steps`. A later step can
/// expose work for an earlier one (brace removal joining two `!`, say), so
/// the whole sequence is repeated until it reaches a fixed point.
pub fn clean_text(text: &str, steps: &[CleanStep]) -> CleanDocument {
    let mut ordered: Vec<CleanStep> = steps.to_vec();
    ordered.sort();
    ordered.dedup();
    let text = fixpoint(text.to_owned(), |t| {
        let mut current = Cow::Borrowed(t);
        for step in &ordered {
            let next = step.apply(&current);
            if next != *current {
                current = Cow::Owned(next);
            }
        }
        current
    });
    CleanDocument {
        text,
        applied_steps: ordered.iter().map(|s| s.name().to_owned()).collect(),
    }
}

const MAX_PASSES: usize = 64;

fn fixpoint<F>(mut text: String, mut pass: F) -> String
where
    F: for<'a> FnMut(&'a str) -> Cow<'a, str>,
{
    for _ in 0..MAX_PASSES {
        match pass(&text) {
            Cow::Borrowed(_) => return text,
            Cow::Owned(next) if next == text => return text,
            Cow::Owned(next) => text = next,
        }
    }
    text
}
