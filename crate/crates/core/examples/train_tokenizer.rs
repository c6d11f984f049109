//! Trains a small BPE vocabulary and inspects what it does to words.

use skbench::tokenizer::{tokenization_stats, train_bpe};

const CORPUS: &[&str] = &[
    "mačka sedí na okne a pozerá sa von",
    "malá mačka sa hrá s klbkom vlny",
    "pes a mačka spolu spia pri peci",
    "na okne sedí aj malý vrabec",
    "mačky a psy sú domáce zvieratá",
];

fn main() -> skbench::Result<()> {
    let model = train_bpe(CORPUS, 120)?;
    println!(
        "vocabulary {} = {} reserved + {} symbols + {} merges",
        model.vocab_size(),
        model.reserved_count(),
        model.alphabet_size(),
        model.merges().len()
    );
    println!("first merges: {:?}", &model.merges()[..5]);

    let text = "mačka pozerá na vrabca";
    let ids = model.encode_ids(text);
    let pieces: Vec<&str> = ids.iter().map(|&id| model.token(id).unwrap_or("?")).collect();
    println!("{text:?} -> {pieces:?}");
    assert_eq!(model.decode(&ids)?, text);

    let words: Vec<&str> = CORPUS.iter().flat_map(|l| l.split(' ')).collect();
    let s = tokenization_stats(&model, &words)?;
    println!(
        "{:.2} chars per token, {:.2} tokens per word, {} token types used ({:.1}%)",
        s.avg_token_len_chars, s.avg_word_len_tokens, s.effective_vocab, s.effective_vocab_pct
    );
    Ok(())
}
