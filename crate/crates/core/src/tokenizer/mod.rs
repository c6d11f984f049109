//! Byte-pair-encoding tokenizer: training, encoding/decoding, persistence
//! and tokenization productivity statistics.
//!
//! Text is pre-tokenized at spaces; every space is replaced by the word
//! marker `▁`, which becomes the first symbol of the following word.
//! Merges never cross piece boundaries, so `decode(encode(text)) == text`
//! whenever every character of `text` is in the vocabulary.

mod bytelevel;
mod io;
mod model;
mod stats;
mod train;

pub use io::{MERGES_FILE, VOCAB_FILE};
pub use model::{PreTokenizer, Token, TokenizerModel, RESERVED_TOKENS, UNK_TOKEN, WORD_MARKER};
pub use stats::{tokenization_stats, TokenizationStats};
pub use train::train_bpe;

#[cfg(test)]
mod tests;
