use std::collections::HashMap;
use std::ops::Range;

use crate::error::{Error, Result};

use super::bytelevel::{BYTE_TO_CHAR, CHAR_TO_BYTE, PIECES};

/// Marks a word that was preceded by a space.
pub const WORD_MARKER: char = '▁';

/// Reserved tokens, occupying ids `0..RESERVED_TOKENS.len()`.
pub const RESERVED_TOKENS: [&str; 7] = ["<s>", "</s>", "<pad>", "<unk>", "<mask>", "<url>", "<email>"];
pub const UNK_TOKEN: &str = "<unk>";

/// How raw text is split into pieces before merges are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreTokenizer {
    /// Spaces become [`WORD_MARKER`], which starts a new piece. Models
    /// trained by this crate use this mode.
    Metaspace,
    /// Byte-level pieces in the GPT-2/RoBERTa convention, for externally
    /// released vocabularies.
    ByteLevel,
}

/// One encoded token. `span` is a range of character (not byte) offsets
/// into the encoded text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: u32,
    pub span: Range<usize>,
}

/// A trained (or loaded) BPE model. Immutable once built.
#[derive(Debug, Clone)]
pub struct TokenizerModel {
    pub(crate) tokens: Vec<String>,
    pub(crate) ids: HashMap<String, u32>,
    pub(crate) merges: Vec<(String, String)>,
    /// (left id, right id) -> (rank, merged id)
    pub(crate) ranks: HashMap<(u32, u32), (u32, u32)>,
    pub(crate) pre_tokenizer: PreTokenizer,
    pub(crate) unk_id: Option<u32>,
    pub(crate) target_vocab_size: usize,
}

/// A piece of text handed to the merge loop: its base symbols and the
/// character span each symbol covers.
struct Piece {
    symbols: Vec<String>,
    spans: Vec<Range<usize>>,
}

impl TokenizerModel {
    /// Builds a model from an id-ordered token list and ordered merges.
    ///
    /// Every merge must join two known tokens into a known token.
    pub fn from_parts(
        tokens: Vec<String>,
        merges: Vec<(String, String)>,
        pre_tokenizer: PreTokenizer,
    ) -> Result<Self> {
        let mut ids = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if ids.insert(t.clone(), i as u32).is_some() {
                return Err(Error::Validation(format!("duplicate vocabulary entry `{t}`")));
            }
        }
        let mut ranks = HashMap::with_capacity(merges.len());
        for (rank, (l, r)) in merges.iter().enumerate() {
            let lookup = |t: &str| {
                ids.get(t).copied().ok_or_else(|| {
                    Error::Validation(format!("merge {rank} ({l} {r}) references unknown token `{t}`"))
                })
            };
            let merged = format!("{l}{r}");
            let key = (lookup(l)?, lookup(r)?);
            let out = lookup(&merged)?;
            ranks.entry(key).or_insert((rank as u32, out));
        }
        let unk_id = ids.get(UNK_TOKEN).copied();
        Ok(Self {
            target_vocab_size: tokens.len(),
            tokens,
            ids,
            merges,
            ranks,
            pre_tokenizer,
            unk_id,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.tokens.len()
    }

    pub fn target_vocab_size(&self) -> usize {
        self.target_vocab_size
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn pre_tokenizer(&self) -> PreTokenizer {
        self.pre_tokenizer
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    /// Tokens in id order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Number of reserved tokens present in the vocabulary.
    pub fn reserved_count(&self) -> usize {
        RESERVED_TOKENS.iter().filter(|t| self.ids.contains_key(**t)).count()
    }

    /// Base symbols: vocabulary entries that are neither reserved nor the
    /// output of a merge.
    pub fn alphabet_size(&self) -> usize {
        let merged: std::collections::HashSet<String> =
            self.merges.iter().map(|(l, r)| format!("{l}{r}")).collect();
        self.tokens
            .iter()
            .filter(|t| !RESERVED_TOKENS.contains(&t.as_str()) && !merged.contains(*t))
            .count()
    }

    /// Encodes text into token ids with character spans.
    ///
    /// Characters missing from the vocabulary become the `<unk>` token.
    pub fn encode(&self, text: &str) -> Vec<Token> {
        let mut out = Vec::new();
        for piece in self.pieces(text) {
            self.encode_piece(piece, &mut out);
        }
        out
    }

    pub fn encode_ids(&self, text: &str) -> Vec<u32> {
        self.encode(text).into_iter().map(|t| t.id).collect()
    }

    /// Encodes one whitespace-free word as it appears after a space in
    /// running text.
    pub fn encode_word(&self, word: &str) -> Vec<Token> {
        let text = format!(" {word}");
        let mut tokens = self.encode(&text);
        for t in &mut tokens {
            t.span = t.span.start.saturating_sub(1)..t.span.end - 1;
        }
        tokens
    }

    /// Concatenates token strings, turning word markers back into spaces.
    pub fn decode(&self, ids: &[u32]) -> Result<String> {
        let mut joined = String::new();
        for &id in ids {
            joined.push_str(self.token(id).ok_or(Error::UnknownId(id))?);
        }
        Ok(match self.pre_tokenizer {
            PreTokenizer::Metaspace => joined.replace(WORD_MARKER, " "),
            PreTokenizer::ByteLevel => {
                let bytes: Vec<u8> = joined
                    .chars()
                    .map(|c| CHAR_TO_BYTE.get(&c).copied().unwrap_or(b'?'))
                    .collect();
                String::from_utf8_lossy(&bytes).into_owned()
            }
        })
    }

    fn pieces(&self, text: &str) -> Vec<Piece> {
        match self.pre_tokenizer {
            PreTokenizer::Metaspace => metaspace_pieces(text),
            PreTokenizer::ByteLevel => byte_level_pieces(text),
        }
    }

    fn encode_piece(&self, piece: Piece, out: &mut Vec<Token>) {
        let mut syms: Vec<(Option<u32>, Range<usize>)> = piece
            .symbols
            .iter()
            .zip(piece.spans)
            .map(|(s, span)| (self.ids.get(s).copied(), span))
            .collect();
        loop {
            let best = syms
                .windows(2)
                .filter_map(|w| match (w[0].0, w[1].0) {
                    (Some(a), Some(b)) => self.ranks.get(&(a, b)).map(|&(rank, out)| (rank, a, b, out)),
                    _ => None,
                })
                .min_by_key(|&(rank, ..)| rank);
            let Some((_, a, b, merged)) = best else { break };
            let mut next = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i].0 == Some(a) && syms[i + 1].0 == Some(b) {
                    next.push((Some(merged), syms[i].1.start..syms[i + 1].1.end));
                    i += 2;
                } else {
                    next.push(syms[i].clone());
                    i += 1;
                }
            }
            syms = next;
        }
        for (id, span) in syms {
            match (id, self.unk_id) {
                (Some(id), _) => out.push(Token { id, span }),
                (None, Some(unk)) => {
                    // merge adjacent unknown characters into one <unk>
                    match out.last_mut() {
                        Some(last) if last.id == unk && last.span.end == span.start => last.span.end = span.end,
                        _ => out.push(Token { id: unk, span }),
                    }
                }
                (None, None) => {}
            }
        }
    }
}

/// Training units: the symbol strings of each metaspace piece.
pub(crate) fn metaspace_words(text: &str) -> Vec<String> {
    metaspace_pieces(text)
        .into_iter()
        .map(|p| p.symbols.concat())
        .collect()
}

fn metaspace_pieces(text: &str) -> Vec<Piece> {
    let mut pieces: Vec<Piece> = Vec::new();
    let mut current: Option<Piece> = None;
    for (pos, c) in text.chars().enumerate() {
        let sym = if c == ' ' { WORD_MARKER } else { c };
        if c == ' ' {
            if let Some(p) = current.take() {
                pieces.push(p);
            }
        }
        let p = current.get_or_insert_with(|| Piece { symbols: Vec::new(), spans: Vec::new() });
        p.symbols.push(sym.to_string());
        p.spans.push(pos..pos + 1);
    }
    pieces.extend(current);
    pieces
}

fn byte_level_pieces(text: &str) -> Vec<Piece> {
    // byte offset -> char offset
    let mut char_at = vec![0usize; text.len() + 1];
    let mut count = 0;
    for (b, c) in text.char_indices() {
        for slot in &mut char_at[b..b + c.len_utf8()] {
            *slot = count;
        }
        count += 1;
    }
    char_at[text.len()] = count;
    PIECES
        .find_iter(text)
        .map(|m| {
            let mut symbols = Vec::with_capacity(m.len());
            let mut spans = Vec::with_capacity(m.len());
            for (offset, byte) in m.as_str().bytes().enumerate() {
                let b = m.start() + offset;
                symbols.push(BYTE_TO_CHAR[byte as usize].to_string());
                let start = char_at[b];
                // a symbol covers its character only when it holds the first byte
                let end = if text.is_char_boundary(b) { start + 1 } else { start };
                let start = if text.is_char_boundary(b) { start } else { start + 1 };
                spans.push(start..end.max(start));
            }
            Piece { symbols, spans }
        })
        .collect()
}
