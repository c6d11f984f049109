//! Small character-level helpers shared by the cleaning and dataset code.

use unicode_general_category::{get_general_category, GeneralCategory};

/// True for characters in any of the Unicode `P*` general categories.
pub fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

/// Collapses every whitespace run to one ASCII space and trims both ends.
pub fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn punctuation_categories() {
        for c in ['-', '!', '?', '.', '„', '“', '(', ')', '_', '…', '#', '%'] {
            assert!(is_punctuation(c), "{c:?}");
        }
        for c in ['a', 'č', '1', ' ', '+', '<', '$'] {
            assert!(!is_punctuation(c), "{c:?}");
        }
    }

    #[test]
    fn collapse() {
        assert_eq!(collapse_whitespace("  a \n\t b  "), "a b");
        assert_eq!(collapse_whitespace(""), "");
    }
}
