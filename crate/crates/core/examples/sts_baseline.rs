//! Averaged word vectors scored against graded sentence similarity.

use skbench::baselines::{avg_embed, sts_score_dataset, EmbeddingTable};
use skbench::datasets::read_sts_from;

// word2vec text format: header line, then `word v1 v2 ...`
const VECTORS: &str = "8 3
pes 1.0 0.1 0.0
psík 0.9 0.2 0.0
mačka 0.2 1.0 0.0
auto 0.0 0.1 1.0
beží 0.5 0.5 0.3
spí 0.4 0.6 0.1
jazdí 0.1 0.3 0.9
rýchlo 0.3 0.3 0.5
";

const PAIRS: &str = "pes beží\tpsík beží\t4.8
pes spí\tmačka spí\t3.0
mačka spí\tauto jazdí rýchlo\t0.4
auto jazdí\tauto jazdí rýchlo\t4.2
psík spí\tauto jazdí\t0.8
";

fn main() -> skbench::Result<()> {
    let table = EmbeddingTable::from_reader(VECTORS.as_bytes(), None)?;
    let pairs = read_sts_from(PAIRS.as_bytes())?;
    let scores = sts_score_dataset(&pairs, |s| avg_embed(s, &table))?;
    for (p, c) in pairs.iter().zip(&scores.cosines) {
        println!("{:.2} gold  {c:.3} cosine  {} | {}", p.score, p.sentence_a, p.sentence_b);
    }
    println!("Spearman {:.4}", scores.spearman);
    Ok(())
}
