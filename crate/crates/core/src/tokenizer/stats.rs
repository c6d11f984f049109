use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::model::TokenizerModel;

/// Tokenization productivity of a model over a word list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenizationStats {
    pub avg_token_len_chars: f64,
    pub avg_word_len_tokens: f64,
    pub effective_vocab: usize,
    pub effective_vocab_pct: f64,
    pub words: usize,
    pub tokens: usize,
}

/// Computes productivity statistics over words (e.g. every FORM of a
/// treebank). Each word is encoded as it appears after a space in running
/// text; token length is measured in characters of the word, so the word
/// marker does not count.
pub fn tokenization_stats<S: AsRef<str>>(model: &TokenizerModel, words: &[S]) -> Result<TokenizationStats> {
    if words.is_empty() {
        return Err(Error::Validation("token statistics need at least one word".into()));
    }
    let segmented: Vec<Vec<u32>> = words
        .iter()
        .map(|w| model.encode_word(w.as_ref()).into_iter().map(|t| t.id).collect())
        .collect();
    let chars: usize = words.iter().map(|w| w.as_ref().chars().count()).sum();
    Ok(stats_from_segmentation(model.vocab_size(), chars, &segmented))
}

pub(crate) fn stats_from_segmentation(vocab_size: usize, chars: usize, segmented: &[Vec<u32>]) -> TokenizationStats {
    let tokens: usize = segmented.iter().map(Vec::len).sum();
    let mut used: Vec<u32> = segmented.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    TokenizationStats {
        avg_token_len_chars: chars as f64 / tokens.max(1) as f64,
        avg_word_len_tokens: tokens as f64 / segmented.len() as f64,
        effective_vocab: used.len(),
        effective_vocab_pct: 100.0 * used.len() as f64 / vocab_size as f64,
        words: segmented.len(),
        tokens,
    }
}
