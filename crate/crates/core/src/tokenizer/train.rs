//! BPE training: repeatedly merge the most frequent adjacent symbol pair.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::model::{metaspace_words, PreTokenizer, TokenizerModel, RESERVED_TOKENS, WORD_MARKER};

/// Heap entry. Higher count wins; equal counts go to the lexicographically
/// smallest (left, right) pair.
#[derive(Debug, PartialEq, Eq)]
struct Candidate {
    count: u64,
    left: String,
    right: String,
    pair: (u32, u32),
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Trains a metaspace BPE model.
///
/// `target_vocab_size` counts the whole vocabulary: reserved tokens, the
/// base alphabet (every character seen plus the word marker) and learned
/// merges. Training stops at the target or when no pair occurs twice.
/// When the concatenation of the best pair is already a vocabulary entry
/// the pair is skipped, so every merge adds exactly one token.
pub fn train_bpe<S: AsRef<str> + Sync>(corpus: &[S], target_vocab_size: usize) -> Result<TokenizerModel> {
    if corpus.iter().all(|s| s.as_ref().is_empty()) {
        return Err(Error::Training("cannot train on an empty corpus".into()));
    }
    let word_counts: HashMap<String, u64> = corpus
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<String, u64>, line| {
            for w in metaspace_words(line.as_ref()) {
                *acc.entry(w).or_default() += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let mut word_list: Vec<(String, u64)> = word_counts.into_iter().collect();
    word_list.sort_unstable();

    let mut alphabet: BTreeSet<String> = BTreeSet::new();
    alphabet.insert(WORD_MARKER.to_string());
    for (w, _) in &word_list {
        alphabet.extend(w.chars().map(String::from));
    }
    let mut tokens: Vec<String> = RESERVED_TOKENS.iter().map(|s| s.to_string()).collect();
    for sym in alphabet {
        if !RESERVED_TOKENS.contains(&sym.as_str()) {
            tokens.push(sym);
        }
    }
    if target_vocab_size < tokens.len() {
        return Err(Error::Training(format!(
            "target vocabulary size {target_vocab_size} is smaller than the base vocabulary ({} tokens)",
            tokens.len()
        )));
    }
    let mut ids: HashMap<String, u32> =
        tokens.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();

    let mut words: Vec<Vec<u32>> = word_list
        .iter()
        .map(|(w, _)| w.chars().map(|c| ids[&c.to_string()]).collect())
        .collect();
    let counts: Vec<u64> = word_list.iter().map(|(_, c)| *c).collect();

    let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
    let mut pair_words: HashMap<(u32, u32), HashSet<usize>> = HashMap::new();
    for (wi, w) in words.iter().enumerate() {
        for p in w.windows(2) {
            let pair = (p[0], p[1]);
            *pair_counts.entry(pair).or_default() += counts[wi];
            pair_words.entry(pair).or_default().insert(wi);
        }
    }
    let candidate = |pair: (u32, u32), count: u64, tokens: &[String]| Candidate {
        count,
        left: tokens[pair.0 as usize].clone(),
        right: tokens[pair.1 as usize].clone(),
        pair,
    };
    let mut heap: BinaryHeap<Candidate> = pair_counts
        .iter()
        .map(|(&pair, &count)| candidate(pair, count, &tokens))
        .collect();

    let mut merges: Vec<(String, String)> = Vec::new();
    let mut blocked: HashSet<(u32, u32)> = HashSet::new();
    while tokens.len() < target_vocab_size {
        let Some(top) = heap.pop() else { break };
        let current = pair_counts.get(&top.pair).copied().unwrap_or(0);
        if current != top.count {
            if current > 0 {
                heap.push(candidate(top.pair, current, &tokens));
            }
            continue;
        }
        if current < 2 {
            break;
        }
        if blocked.contains(&top.pair) {
            continue;
        }
        let merged = format!("{}{}", top.left, top.right);
        if ids.contains_key(&merged) {
            blocked.insert(top.pair);
            continue;
        }
        let new_id = tokens.len() as u32;
        ids.insert(merged.clone(), new_id);
        tokens.push(merged);
        merges.push((top.left.clone(), top.right.clone()));

        let mut touched: HashSet<(u32, u32)> = HashSet::new();
        let mut affected: Vec<usize> = pair_words
            .get(&top.pair)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        affected.sort_unstable();
        for wi in affected {
            let word = &mut words[wi];
            if !word.windows(2).any(|p| (p[0], p[1]) == top.pair) {
                continue;
            }
            let n = counts[wi];
            for p in word.windows(2) {
                let pair = (p[0], p[1]);
                let c = pair_counts.get_mut(&pair).expect("pair counted");
                *c -= n;
                touched.insert(pair);
            }
            let mut next = Vec::with_capacity(word.len());
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && (word[i], word[i + 1]) == top.pair {
                    next.push(new_id);
                    i += 2;
                } else {
                    next.push(word[i]);
                    i += 1;
                }
            }
            *word = next;
            for p in word.windows(2) {
                let pair = (p[0], p[1]);
                *pair_counts.entry(pair).or_default() += n;
                pair_words.entry(pair).or_default().insert(wi);
                touched.insert(pair);
            }
        }
        let mut touched: Vec<_> = touched.into_iter().collect();
        touched.sort_unstable();
        for pair in touched {
            match pair_counts.get(&pair).copied() {
                Some(0) => {
                    pair_counts.remove(&pair);
                    pair_words.remove(&pair);
                }
                Some(c) if !blocked.contains(&pair) => heap.push(candidate(pair, c, &tokens)),
                _ => {}
            }
        }
    }

    let mut model = TokenizerModel::from_parts(tokens, merges, PreTokenizer::Metaspace)?;
    model.target_vocab_size = target_vocab_size;
    Ok(model)
}
