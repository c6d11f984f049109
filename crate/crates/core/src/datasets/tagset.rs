//! Slovak POS tagsets: the 17 universal tags, the 19 first-letter XPOS
//! tags and the relation between them.

use crate::error::{Error, Result};

pub const UPOS_TAGS: [&str; 17] = [
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM", "PART", "PRON", "PROPN",
    "PUNCT", "SCONJ", "SYM", "VERB", "X",
];

pub const XPOS_TAGS: [char; 19] = [
    'A', 'G', 'E', 'D', 'Y', 'V', 'O', 'P', 'R', 'J', 'S', 'N', '0', 'T', 'Z', 'W', 'Q', '#', '%',
];

/// Human-readable name of a reduced XPOS tag.
pub fn xpos_description(tag: char) -> Option<&'static str> {
    Some(match tag {
        'A' => "adjective",
        'G' => "participle",
        'E' => "preposition",
        'D' => "adverb",
        'Y' => "conditional morpheme",
        'V' => "verb",
        'O' => "conjunction",
        'P' => "pronoun",
        'R' => "reflexive pronoun",
        'J' => "interjection",
        'S' => "noun",
        'N' => "numeral",
        '0' => "digit",
        'T' => "particle",
        'Z' => "punctuation",
        'W' => "abbreviation",
        'Q' => "unidentifiable",
        '#' => "non-word element",
        '%' => "citation in foreign language",
        _ => return None,
    })
}

/// UPOS tags compatible with a reduced XPOS tag.
pub fn compatible_upos(tag: char) -> &'static [&'static str] {
    match tag {
        'A' | 'G' => &["ADJ"],
        'E' => &["ADP"],
        'D' => &["ADV"],
        'Y' => &["AUX"],
        'V' => &["AUX", "VERB"],
        'O' => &["CCONJ", "SCONJ"],
        'P' => &["DET", "PRON"],
        'R' => &["PRON"],
        'J' => &["INTJ"],
        'S' => &["NOUN", "PROPN"],
        'N' | '0' => &["NUM"],
        'T' => &["PART"],
        'Z' => &["PUNCT"],
        'W' | 'Q' | '#' | '%' => &["X"],
        _ => &[],
    }
}

pub fn is_upos(tag: &str) -> bool {
    UPOS_TAGS.contains(&tag)
}

/// Keeps the first character of a full XPOS label.
pub fn xpos_reduce(label: &str) -> Result<char> {
    let first = label
        .chars()
        .next()
        .ok_or_else(|| Error::Validation("empty XPOS label".into()))?;
    if XPOS_TAGS.contains(&first) {
        Ok(first)
    } else {
        Err(Error::Validation(format!(
            "XPOS label `{label}` starts with `{first}`, which is not a Slovak POS tag"
        )))
    }
}
