//! TF-IDF features plus a linear classifier trained with SGD, scored with
//! three- and two-class macro-F1.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skbench::baselines::{predict, sgd_train, tfidf_fit, SgdConfig};
use skbench::datasets::{clean_tweet, dedup_labeled, split, LabeledText, SplitSpec};
use skbench::metrics::{confusion, macro_f1, two_class_macro_f1, TwoClassMode};

fn synthetic_tweets(n: usize) -> Vec<LabeledText> {
    let cues = [
        ("positive", ["super", "paráda", "skvelé", "ďakujem", "teším"]),
        ("negative", ["hrôza", "zlé", "nanič", "sklamanie", "škoda"]),
        ("neutral", ["dnes", "stretnutie", "správa", "vláda", "zajtra"]),
    ];
    let filler = ["to", "je", "a", "na", "v", "@jano", "#slovensko", "RT"];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    (0..n)
        .map(|i| {
            let (label, words) = cues[i % 3];
            let mut t: Vec<&str> = (0..rng.gen_range(2..5)).map(|_| *words.choose(&mut rng).unwrap()).collect();
            t.extend((0..rng.gen_range(2..6)).map(|_| *filler.choose(&mut rng).unwrap()));
            t.shuffle(&mut rng);
            LabeledText::new(clean_tweet(&t.join(" ")), label)
        })
        .collect()
}

fn main() -> skbench::Result<()> {
    let (tweets, stats) = dedup_labeled(&synthetic_tweets(600));
    println!("{} tweets after dedup ({} merged, {} dropped)", stats.kept, stats.merged, stats.dropped);

    let spec = SplitSpec { stratified: true, ..SplitSpec::new(0.8, 0.0, 0.2, 13) };
    let (train, _, test) = split(&tweets, Some(&|t: &LabeledText| t.label.clone()), &spec)?;

    let texts: Vec<&str> = train.iter().map(|t| t.text.as_str()).collect();
    let tfidf = tfidf_fit(&texts, (1, 2), 2)?;
    let rows: Vec<_> = texts.iter().map(|t| tfidf.transform(t)).collect();
    let y: Vec<&str> = train.iter().map(|t| t.label.as_str()).collect();
    let model = sgd_train(&rows, &y, tfidf.dim(), &SgdConfig::default())?;

    let gold: Vec<&str> = test.iter().map(|t| t.label.as_str()).collect();
    let pred: Vec<String> = test
        .iter()
        .map(|t| predict(&model, &tfidf.transform(&t.text)).map(|p| p.label))
        .collect::<skbench::Result<_>>()?;
    let pred: Vec<&str> = pred.iter().map(String::as_str).collect();
    let classes = ["negative", "neutral", "positive"];
    let report = macro_f1(&confusion(&gold, &pred, &classes)?, &classes)?;
    println!("{report}");
    let two = two_class_macro_f1(&gold, &pred, &classes, "positive", "negative", "neutral", TwoClassMode::AverageOnly)?;
    println!("macro-F1 (3 classes) {:.4}, (positive/negative) {:.4}", report.macro_f1, two.macro_f1);
    Ok(())
}
