use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;

use super::model::metaspace_words;
use super::*;

/// Naive trainer: recount every pair on every iteration.
fn oracle_merges(corpus: &[&str], extra: usize) -> Vec<(String, String)> {
    let mut words: Vec<(Vec<String>, u64)> = {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for line in corpus {
            for w in metaspace_words(line) {
                *counts.entry(w).or_default() += 1;
            }
        }
        counts
            .into_iter()
            .map(|(w, c)| (w.chars().map(String::from).collect(), c))
            .collect()
    };
    let mut vocab: HashSet<String> = words.iter().flat_map(|(w, _)| w.clone()).collect();
    let mut merges = Vec::new();
    let mut blocked = HashSet::new();
    while merges.len() < extra {
        let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
        for (w, c) in &words {
            for p in w.windows(2) {
                *counts.entry((p[0].clone(), p[1].clone())).or_default() += c;
            }
        }
        // BTreeMap iterates pairs in lexicographic order; keep the first maximum
        let best = counts
            .iter()
            .filter(|(p, _)| !blocked.contains(*p))
            .fold(None::<(&(String, String), u64)>, |acc, (p, &c)| match acc {
                Some((_, bc)) if bc >= c => acc,
                _ => Some((p, c)),
            });
        let Some((pair, count)) = best else { break };
        if count < 2 {
            break;
        }
        let merged = format!("{}{}", pair.0, pair.1);
        if vocab.contains(&merged) {
            blocked.insert(pair.clone());
            continue;
        }
        vocab.insert(merged.clone());
        let pair = pair.clone();
        for (w, _) in &mut words {
            let mut next = Vec::new();
            let mut i = 0;
            while i < w.len() {
                if i + 1 < w.len() && w[i] == pair.0 && w[i + 1] == pair.1 {
                    next.push(merged.clone());
                    i += 2;
                } else {
                    next.push(w[i].clone());
                    i += 1;
                }
            }
            *w = next;
        }
        merges.push(pair);
    }
    merges
}

/// Replays merges in learned order over one piece.
fn replay(model: &TokenizerModel, piece: &str) -> Vec<String> {
    let mut syms: Vec<String> = piece.chars().map(String::from).collect();
    for (l, r) in model.merges() {
        let mut next = Vec::new();
        let mut i = 0;
        while i < syms.len() {
            if i + 1 < syms.len() && &syms[i] == l && &syms[i + 1] == r {
                next.push(format!("{l}{r}"));
                i += 2;
            } else {
                next.push(syms[i].clone());
                i += 1;
            }
        }
        syms = next;
    }
    syms
}

fn base_size(model: &TokenizerModel) -> usize {
    model.reserved_count() + model.alphabet_size()
}

const CORPUS: &[&str] = &[
    "mama má malú mačku",
    "malá mačka má mamu",
    "otec má malého psa a mačka nemá psa",
    "pes a mačka sú doma",
];

#[test]
fn classic_first_merge() {
    let base = train_bpe(&["aaabdaaabac"], 0).unwrap_err();
    assert!(matches!(base, crate::Error::Training(_)));
    let probe = train_bpe(&["aaabdaaabac"], 12).unwrap();
    let base = base_size(&probe);
    let model = train_bpe(&["aaabdaaabac"], base + 3).unwrap();
    let oracle = oracle_merges(&["aaabdaaabac"], 3);
    assert_eq!(oracle[0], ("a".to_string(), "a".to_string()));
    assert_eq!(model.merges(), oracle.as_slice());
}

#[test]
fn no_budget_no_merges() {
    let probe = train_bpe(CORPUS, 1000).unwrap();
    let base = base_size(&probe);
    let model = train_bpe(CORPUS, base).unwrap();
    assert!(model.merges().is_empty());
    assert_eq!(model.vocab_size(), base);
}

#[test]
fn matches_naive_trainer() {
    let model = train_bpe(CORPUS, 200).unwrap();
    let oracle = oracle_merges(CORPUS, usize::MAX);
    assert_eq!(model.merges(), oracle.as_slice());
}

#[test]
fn deterministic_training() {
    let a = train_bpe(CORPUS, 60).unwrap();
    let b = train_bpe(CORPUS, 60).unwrap();
    assert_eq!(a.merges(), b.merges());
    assert_eq!(a.tokens(), b.tokens());
}

#[test]
fn empty_corpus_fails() {
    assert!(train_bpe::<&str>(&[], 100).is_err());
    assert!(train_bpe(&[""], 100).is_err());
}

#[test]
fn reserved_ids_come_first() {
    let model = train_bpe(CORPUS, 60).unwrap();
    for (i, t) in RESERVED_TOKENS.iter().enumerate() {
        assert_eq!(model.id(t), Some(i as u32));
    }
}

#[test]
fn merge_count_bound() {
    let model = train_bpe(CORPUS, 70).unwrap();
    assert_eq!(
        model.merges().len(),
        model.vocab_size() - model.alphabet_size() - model.reserved_count()
    );
}

#[test]
fn encode_matches_merge_replay() {
    let model = train_bpe(CORPUS, 70).unwrap();
    for word in ["mačka", "▁mačka", "▁malého", "▁psa", "▁nemá"] {
        let text = word.replace('▁', " ");
        let got: Vec<&str> = model
            .encode(&text)
            .iter()
            .map(|t| model.token(t.id).unwrap())
            .collect();
        assert_eq!(got, replay(&model, word), "{word}");
    }
}

#[test]
fn spans_tile_text() {
    let model = train_bpe(CORPUS, 70).unwrap();
    let text = "mama  má psa ";
    let tokens = model.encode(text);
    let mut pos = 0;
    for t in &tokens {
        assert_eq!(t.span.start, pos);
        pos = t.span.end;
    }
    assert_eq!(pos, text.chars().count());
}

#[test]
fn single_char_and_unknown() {
    let model = train_bpe(CORPUS, 70).unwrap();
    assert_eq!(model.encode("a").len(), 1);
    let tokens = model.encode("xyz");
    assert_eq!(tokens.len(), 1);
    assert_eq!(model.token(tokens[0].id), Some(UNK_TOKEN));
    assert_eq!(tokens[0].span, 0..3);
}

#[test]
fn decode_contract() {
    let model = train_bpe(CORPUS, 70).unwrap();
    assert_eq!(model.decode(&[]).unwrap(), "");
    let bad = model.vocab_size() as u32;
    assert!(matches!(model.decode(&[bad]), Err(crate::Error::UnknownId(id)) if id == bad));
}

#[test]
fn stats_fixture() {
    let tokens: Vec<String> = RESERVED_TOKENS
        .iter()
        .map(|s| s.to_string())
        .chain(["▁", "a", "b", "c", "d", "e", "▁a", "▁ab", "▁d", "▁de"].map(String::from))
        .collect();
    let merges = [("▁", "a"), ("▁a", "b"), ("▁", "d"), ("▁d", "e")]
        .map(|(l, r)| (l.to_string(), r.to_string()))
        .to_vec();
    let model = TokenizerModel::from_parts(tokens, merges, PreTokenizer::Metaspace).unwrap();
    let seg: Vec<Vec<&str>> = ["abc", "de"]
        .iter()
        .map(|w| model.encode_word(w).iter().map(|t| model.token(t.id).unwrap()).collect())
        .collect();
    assert_eq!(seg, [vec!["▁ab", "c"], vec!["▁de"]]);
    let stats = tokenization_stats(&model, &["abc", "de"]).unwrap();
    assert_eq!(stats.avg_token_len_chars, 5.0 / 3.0);
    assert_eq!(stats.avg_word_len_tokens, 1.5);
    assert_eq!(stats.effective_vocab, 3);
    assert_eq!(stats.effective_vocab_pct, 100.0 * 3.0 / model.vocab_size() as f64);

    let one = TokenizerModel::from_parts(
        vec!["▁".into(), "x".into(), "▁x".into()],
        vec![("▁".into(), "x".into())],
        PreTokenizer::Metaspace,
    )
    .unwrap();
    let s = tokenization_stats(&one, &["x"]).unwrap();
    assert_eq!((s.avg_token_len_chars, s.avg_word_len_tokens, s.effective_vocab), (1.0, 1.0, 1));
    assert!(tokenization_stats::<&str>(&one, &[]).is_err());
}

#[test]
fn save_and_load() {
    let model = train_bpe(CORPUS, 70).unwrap();
    let dir = tempfile::tempdir().unwrap();
    model.save(dir.path()).unwrap();
    let merges = std::fs::read_to_string(dir.path().join(MERGES_FILE)).unwrap();
    assert!(merges.starts_with("#version"));
    let loaded = TokenizerModel::load(dir.path()).unwrap();
    assert_eq!(loaded.tokens(), model.tokens());
    assert_eq!(loaded.merges(), model.merges());
    assert_eq!(loaded.pre_tokenizer(), PreTokenizer::Metaspace);
    for line in CORPUS {
        assert_eq!(loaded.encode(line), model.encode(line));
    }
}

#[test]
fn load_rejects_bad_merge() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join(VOCAB_FILE), r#"{"a":0,"b":1}"#).unwrap();
    std::fs::write(dir.path().join(MERGES_FILE), "#version: 0.2\na b\n").unwrap();
    assert!(TokenizerModel::load(dir.path()).is_err());
    std::fs::write(dir.path().join(VOCAB_FILE), r#"{"a":0,"b":2}"#).unwrap();
    assert!(TokenizerModel::load(dir.path()).is_err());
}

#[test]
fn byte_level_vocabulary() {
    // tiny GPT-2 style vocabulary: "Ġ" + "p" -> "Ġp", "Ġp" + "es" -> "Ġpes"
    let tokens: Vec<String> = ["<s>", "<unk>", "Ġ", "p", "e", "s", "es", "Ġp", "Ġpes", "Ã", "¡"]
        .map(String::from)
        .to_vec();
    let merges = [("e", "s"), ("Ġ", "p"), ("Ġp", "es")]
        .map(|(l, r)| (l.to_string(), r.to_string()))
        .to_vec();
    let model = TokenizerModel::from_parts(tokens, merges, PreTokenizer::ByteLevel).unwrap();
    let ids = model.encode_ids(" pes");
    assert_eq!(ids, [model.id("Ġpes").unwrap()]);
    assert_eq!(model.decode(&ids).unwrap(), " pes");
    // "á" is two bytes, mapped to "Ã" and "¡"
    let ids = model.encode_ids("á");
    assert_eq!(model.decode(&ids).unwrap(), "á");
    let stats = tokenization_stats(&model, &["pes"]).unwrap();
    assert_eq!(stats.avg_word_len_tokens, 1.0);
    assert_eq!(stats.avg_token_len_chars, 3.0);
}

fn trained() -> &'static TokenizerModel {
    static MODEL: std::sync::OnceLock<TokenizerModel> = std::sync::OnceLock::new();
    MODEL.get_or_init(|| train_bpe(CORPUS, 80).unwrap())
}

proptest! {
    #[test]
    fn round_trip_in_alphabet(text in "[mačkápsotehúlédn ]{0,40}") {
        let model = trained();
        let ids = model.encode_ids(&text);
        prop_assert_eq!(model.decode(&ids).unwrap(), text);
    }

    #[test]
    fn more_merges_never_more_tokens(text in "[mačkápsotehúlédn ]{1,40}", small in 30usize..60, extra in 0usize..40) {
        let a = train_bpe(CORPUS, small).unwrap();
        let b = train_bpe(CORPUS, small + extra).unwrap();
        prop_assert!(b.encode(&text).len() <= a.encode(&text).len());
    }
}
