//! Metric functions on small fixtures and a rendered comparison table.

use std::collections::BTreeMap;

use skbench::harness::{render_report, EvalReport, Task};
use skbench::metrics::{confusion, macro_f1, pos_word_accuracy, spearman};

fn main() -> skbench::Result<()> {
    let gold = ["positive", "positive", "negative", "negative", "neutral", "neutral"];
    let pred = ["positive", "negative", "negative", "negative", "neutral", "positive"];
    let classes = ["positive", "negative", "neutral"];
    let cm = confusion(&gold, &pred, &classes)?;
    println!("{}", macro_f1(&cm, &classes)?);

    let rho = spearman(&[1.0, 2.0, 2.0, 4.0, 5.0], &[0.1, 0.3, 0.3, 0.2, 0.9])?;
    println!("Spearman with ties: {rho:.4}");

    // "Bratislava" is split into two subword tokens; only the first counts
    let acc = pos_word_accuracy(&[vec!["PROPN", "VERB"]], &[vec!["PROPN", "X", "VERB"]], &[vec![0, 2]])?;
    println!("word accuracy from subword predictions: {acc}");

    let reports: Vec<EvalReport> = [("baseline-tfidf", 0.571, 0.603), ("baseline-avgvec", 0.591, 0.622), ("slovakbert", 0.724, 0.796)]
        .into_iter()
        .map(|(model, f3, f2)| EvalReport {
            task: Task::Sentiment,
            model: model.into(),
            metrics: BTreeMap::from([("macro_f1_3".into(), f3), ("macro_f1_2".into(), f2)]),
            config_digest: String::new(),
            timestamp: String::new(),
        })
        .collect();
    print!("{}", render_report(&reports)?.table);
    Ok(())
}
