//! Rule-based sentence splitter.
//!
//! A sentence ends at a word carrying terminal punctuation (`.`, `?`, `!`,
//! `…`, optionally followed by closing quotes or brackets) when the next
//! word starts with an uppercase letter or a digit. Words ending in `.`
//! that are known Slovak abbreviations or single-letter initials never end
//! a sentence. Line breaks are hard boundaries.

use std::collections::HashSet;
use std::sync::LazyLock;

static ABBREVIATIONS: LazyLock<HashSet<&'static str>> = LazyLock::new(|| {
    [
        "a.s", "ap", "atď", "bc", "cca", "csc", "č", "dr", "doc", "drsc", "gen", "hod", "ing",
        "judr", "kap", "kpt", "max", "mgr", "mil", "min", "mjr", "mld", "mudr", "mvdr", "nám",
        "napr", "npor", "obr", "odst", "paeddr", "phd", "phdr", "písm", "pí", "plk", "pod", "por",
        "porov", "pozn", "prof", "resp", "rndr", "roč", "s.r.o", "sr", "spol", "st", "stor", "str",
        "sv", "t.j", "t.z", "tab", "tel", "tis", "tj", "tzn", "tzv", "ul", "viď", "vs", "vyd",
        "zb", "zn", "ml",
    ]
    .into_iter()
    .collect()
});

const TERMINALS: &[char] = &['.', '?', '!', '…'];
const CLOSERS: &[char] = &['"', '\'', '“', '”', '»', '’', ')', ']'];
const OPENERS: &[char] = &['"', '\'', '„', '“', '«', '‚', '‘', '(', '['];

/// Splits cleaned text into sentences.
///
/// Whitespace inside a sentence is collapsed to single spaces; empty
/// sentences are never produced.
pub fn segment_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    for line in text.lines() {
        let words: Vec<&str> = line.split_whitespace().collect();
        let mut current: Vec<&str> = Vec::new();
        for (i, word) in words.iter().enumerate() {
            current.push(word);
            let next = words.get(i + 1);
            if next.is_some_and(|n| ends_sentence(word, n)) {
                sentences.push(current.join(" "));
                current.clear();
            }
        }
        if !current.is_empty() {
            sentences.push(current.join(" "));
        }
    }
    sentences
}

fn ends_sentence(word: &str, next: &str) -> bool {
    let core = word.trim_end_matches(CLOSERS);
    let Some(last) = core.chars().last() else {
        return false;
    };
    if !TERMINALS.contains(&last) {
        return false;
    }
    let Some(first_next) = next.trim_start_matches(OPENERS).chars().next() else {
        return false;
    };
    if !(first_next.is_uppercase() || first_next.is_ascii_digit()) {
        return false;
    }
    if last == '.' && !core.ends_with("..") {
        let stem = core.trim_end_matches('.').trim_start_matches(OPENERS);
        if is_abbreviation(stem) {
            return false;
        }
        // ordinal numbers such as "31. 12. 2020"
        if !stem.is_empty() && stem.chars().all(|c| c.is_ascii_digit()) && first_next.is_ascii_digit() {
            return false;
        }
    }
    true
}

fn is_abbreviation(stem: &str) -> bool {
    let mut chars = stem.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        return c.is_alphabetic();
    }
    ABBREVIATIONS.contains(stem.to_lowercase().as_str())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_split() {
        assert_eq!(segment_sentences("Ahoj. Ako sa máš?"), ["Ahoj.", "Ako sa máš?"]);
        assert_eq!(segment_sentences("Jedna veta"), ["Jedna veta"]);
        assert!(segment_sentences("").is_empty());
        assert!(segment_sentences("  \n \n").is_empty());
    }

    #[test]
    fn abbreviations_and_initials() {
        assert_eq!(
            segment_sentences("Dr. Novák prišiel. Odišiel."),
            ["Dr. Novák prišiel.", "Odišiel."]
        );
        assert_eq!(segment_sentences("Prišiel J. Kováč."), ["Prišiel J. Kováč."]);
        assert_eq!(segment_sentences("Napr. Bratislava, atď. Koniec"), ["Napr. Bratislava, atď. Koniec"]);
    }

    #[test]
    fn numbers() {
        assert_eq!(segment_sentences("Dňa 31. 12. 2020 sme boli doma."), ["Dňa 31. 12. 2020 sme boli doma."]);
        assert_eq!(segment_sentences("Bolo ich 5. 6 prišlo neskôr."), ["Bolo ich 5. 6 prišlo neskôr."]);
        assert_eq!(segment_sentences("Je to rok 2020. Potom nič."), ["Je to rok 2020.", "Potom nič."]);
    }

    #[test]
    fn quotes_and_lowercase() {
        assert_eq!(
            segment_sentences("Povedal: „Nie!“ Potom odišiel."),
            ["Povedal: „Nie!“", "Potom odišiel."]
        );
        assert_eq!(segment_sentences("To je 3.5 percenta. a tak"), ["To je 3.5 percenta. a tak"]);
        assert_eq!(segment_sentences("Čo? Nie!! Áno..."), ["Čo?", "Nie!!", "Áno..."]);
    }

    #[test]
    fn line_breaks_are_boundaries() {
        assert_eq!(segment_sentences("Titulok\nTelo  textu."), ["Titulok", "Telo textu."]);
    }
}
