use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fraction of positions where `pred` equals `gold`.
pub fn accuracy<T: PartialEq>(gold: &[T], pred: &[T]) -> Result<f64> {
    if gold.len() != pred.len() {
        return Err(Error::Metric(format!(
            "accuracy needs equal lengths, got {} gold and {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::Metric("accuracy of an empty sequence is undefined".into()));
    }
    let hits = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    Ok(hits as f64 / gold.len() as f64)
}

/// Confusion matrix, rows gold and columns predicted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    fn index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }
}

pub fn confusion<S: AsRef<str>>(gold: &[S], pred: &[S], classes: &[S]) -> Result<ConfusionCounts> {
    if gold.len() != pred.len() {
        return Err(Error::Metric(format!(
            "confusion needs equal lengths, got {} and {}",
            gold.len(),
            pred.len()
        )));
    }
    let classes: Vec<String> = classes.iter().map(|c| c.as_ref().to_owned()).collect();
    let k = classes.len();
    let mut cm = ConfusionCounts {
        classes,
        counts: vec![vec![0; k]; k],
    };
    for (g, p) in gold.iter().zip(pred) {
        let lookup = |l: &str| {
            cm.index(l)
                .ok_or_else(|| Error::Metric(format!("label `{l}` is not one of the classes")))
        };
        let (i, j) = (lookup(g.as_ref())?, lookup(p.as_ref())?);
        cm.counts[i][j] += 1;
    }
    Ok(cm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// Set when any of P, R or F1 had a zero denominator and was defined as 0.
    pub zero_division: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F1Report {
    pub per_class: Vec<ClassScores>,
    pub macro_f1: f64,
    pub class_subset: Vec<String>,
}

impl F1Report {
    pub fn class(&self, label: &str) -> Option<&ClassScores> {
        self.per_class.iter().find(|c| c.label == label)
    }

    pub fn flagged(&self) -> Vec<&str> {
        self.per_class
            .iter()
            .filter(|c| c.zero_division)
            .map(|c| c.label.as_str())
            .collect()
    }
}

impl fmt::Display for F1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.per_class.iter().map(|c| c.label.len()).max().unwrap_or(5).max(5);
        writeln!(f, "{:<width$}  {:>9}  {:>9}  {:>9}  {:>7}", "class", "precision", "recall", "f1", "support")?;
        for c in &self.per_class {
            let mark = if c.zero_division { " (0/0)" } else { "" };
            writeln!(
                f,
                "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>7}{mark}",
                c.label, c.precision, c.recall, c.f1, c.support
            )?;
        }
        write!(f, "macro-F1 over [{}]: {:.4}", self.class_subset.join(", "), self.macro_f1)
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Per-class scores for every class and the unweighted F1 mean over `subset`.
///
/// Zero denominators yield 0 and set `zero_division` on the class.
pub fn macro_f1<S: AsRef<str>>(cm: &ConfusionCounts, subset: &[S]) -> Result<F1Report> {
    if subset.is_empty() {
        return Err(Error::Metric("macro-F1 over an empty class subset".into()));
    }
    let k = cm.classes.len();
    let per_class: Vec<ClassScores> = (0..k)
        .map(|i| {
            let tp = cm.counts[i][i];
            let predicted: u64 = (0..k).map(|r| cm.counts[r][i]).sum();
            let support: u64 = cm.counts[i].iter().sum();
            let p = ratio(tp, predicted);
            let r = ratio(tp, support);
            let f1 = match (p, r) {
                (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
                _ => None,
            };
            ClassScores {
                label: cm.classes[i].clone(),
                precision: p.unwrap_or(0.0),
                recall: r.unwrap_or(0.0),
                f1: f1.unwrap_or(0.0),
                support,
                zero_division: p.is_none() || r.is_none() || f1.is_none(),
            }
        })
        .collect();
    let mut sum = 0.0;
    let mut names = Vec::with_capacity(subset.len());
    for s in subset {
        let i = cm
            .index(s.as_ref())
            .ok_or_else(|| Error::Metric(format!("subset class `{}` is not in the matrix", s.as_ref())))?;
        sum += per_class[i].f1;
        names.push(cm.classes[i].clone());
    }
    Ok(F1Report {
        macro_f1: sum / subset.len() as f64,
        per_class,
        class_subset: names,
    })
}

/// How the positive/negative-only F1 treats the neutral class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoClassMode {
    /// Neutral stays in the confusion matrix (predicting neutral for a
    /// positive tweet costs recall) and is only left out of the average.
    #[default]
    AverageOnly,
    /// Items with neutral gold labels are removed before counting.
    DropNeutralGold,
}

/// Macro-F1 over the positive and negative classes only.
pub fn two_class_macro_f1<S: AsRef<str>>(
    gold: &[S],
    pred: &[S],
    classes: &[S],
    positive: &str,
    negative: &str,
    neutral: &str,
    mode: TwoClassMode,
) -> Result<F1Report> {
    let cm = match mode {
        TwoClassMode::AverageOnly => confusion(gold, pred, classes)?,
        TwoClassMode::DropNeutralGold => {
            if gold.len() != pred.len() {
                return Err(Error::Metric("gold and predicted lengths differ".into()));
            }
            let (g, p): (Vec<&str>, Vec<&str>) = gold
                .iter()
                .zip(pred)
                .map(|(g, p)| (g.as_ref(), p.as_ref()))
                .filter(|(g, _)| *g != neutral)
                .unzip();
            let c: Vec<&str> = classes.iter().map(AsRef::as_ref).collect();
            confusion(&g, &p, &c)?
        }
    };
    macro_f1(&cm, &[positive, negative])
}

/// Word-level accuracy when predictions exist per subword token: each word
/// takes the prediction of its first token.
///
/// `gold[s][w]` is the tag of word `w` in sentence `s`, `token_preds[s][t]`
/// the predicted tag of token `t`, and `word_first_token[s][w]` the index of
/// the first token of word `w`.
pub fn pos_word_accuracy<S: AsRef<str>>(
    gold: &[Vec<S>],
    token_preds: &[Vec<S>],
    word_first_token: &[Vec<usize>],
) -> Result<f64> {
    if gold.len() != token_preds.len() || gold.len() != word_first_token.len() {
        return Err(Error::Metric(format!(
            "sentence counts differ: {} gold, {} predicted, {} alignments",
            gold.len(),
            token_preds.len(),
            word_first_token.len()
        )));
    }
    let mut g_all = Vec::new();
    let mut p_all = Vec::new();
    for (s, ((g, p), align)) in gold.iter().zip(token_preds).zip(word_first_token).enumerate() {
        if align.len() != g.len() {
            return Err(Error::Metric(format!(
                "sentence {s}: {} words but {} first-token indices",
                g.len(),
                align.len()
            )));
        }
        for (w, (tag, &first)) in g.iter().zip(align).enumerate() {
            let pred = p.get(first).ok_or_else(|| {
                Error::Metric(format!("sentence {s}, word {w}: first token {first} has no prediction"))
            })?;
            g_all.push(tag.as_ref());
            p_all.push(pred.as_ref());
        }
    }
    accuracy(&g_all, &p_all)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CLASSES: [&str; 3] = ["positive", "negative", "neutral"];
    const GOLD: [&str; 6] = ["positive", "positive", "negative", "negative", "neutral", "neutral"];
    const PRED: [&str; 6] = ["positive", "negative", "negative", "negative", "neutral", "positive"];

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 2], &[3, 4]).unwrap(), 0.0);
        let gold: Vec<u8> = vec![0; 100];
        let pred: Vec<u8> = (0..100).map(|i| u8::from(i < 3)).collect();
        assert_eq!(accuracy(&gold, &pred).unwrap(), 0.97);
        assert!(accuracy::<u8>(&[], &[]).is_err());
        assert!(accuracy(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn confusion_fixture() {
        let cm = confusion(&GOLD, &PRED, &CLASSES).unwrap();
        assert_eq!(cm.counts, vec![vec![1, 1, 0], vec![0, 2, 0], vec![1, 0, 1]]);
        assert_eq!(confusion::<&str>(&[], &[], &["a", "b"]).unwrap().counts, vec![vec![0, 0], vec![0, 0]]);
        assert_eq!(confusion(&["a"], &["a"], &["a", "b"]).unwrap().counts, vec![vec![1, 0], vec![0, 0]]);
        assert!(confusion(&["a"], &["c"], &["a", "b"]).is_err());
    }

    #[test]
    fn sentiment_fixture() {
        let cm = confusion(&GOLD, &PRED, &CLASSES).unwrap();
        let r = macro_f1(&cm, &CLASSES).unwrap();
        assert_eq!(r.class("positive").unwrap().f1, 0.5);
        assert!((r.class("negative").unwrap().f1 - 0.8).abs() < 1e-15);
        assert!((r.class("neutral").unwrap().f1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.macro_f1 - 59.0 / 90.0).abs() < 1e-15);
        assert_eq!((r.macro_f1 * 1e4).round() / 1e4, 0.6556);
        let two = macro_f1(&cm, &["positive", "negative"]).unwrap();
        assert!((two.macro_f1 - 0.65).abs() < 1e-15);
        let via = two_class_macro_f1(&GOLD, &PRED, &CLASSES, "positive", "negative", "neutral", TwoClassMode::AverageOnly).unwrap();
        assert_eq!(via.macro_f1, two.macro_f1);
    }

    #[test]
    fn drop_neutral_mode() {
        // dropping neutral gold removes the neutral->positive error, so positive precision rises
        let r = two_class_macro_f1(&GOLD, &PRED, &CLASSES, "positive", "negative", "neutral", TwoClassMode::DropNeutralGold).unwrap();
        let pos = r.class("positive").unwrap();
        assert_eq!((pos.precision, pos.recall), (1.0, 0.5));
    }

    #[test]
    fn absent_class_flagged() {
        let cm = confusion(&["a", "a"], &["a", "a"], &["a", "b"]).unwrap();
        let r = macro_f1(&cm, &["a", "b"]).unwrap();
        assert_eq!(r.class("b").unwrap().f1, 0.0);
        assert_eq!(r.flagged(), ["b"]);
        assert_eq!(r.macro_f1, 0.5);
        assert!(macro_f1::<&str>(&cm, &[]).is_err());
        assert!(macro_f1(&cm, &["c"]).is_err());
    }

    #[test]
    fn perfect_diagonal() {
        let cm = confusion(&["a", "b", "c"], &["a", "b", "c"], &["a", "b", "c"]).unwrap();
        assert_eq!(macro_f1(&cm, &["a", "b", "c"]).unwrap().macro_f1, 1.0);
    }

    #[test]
    fn first_token_alignment() {
        // one word split into three tokens; only the first prediction counts
        let gold = vec![vec!["NOUN"]];
        let preds = vec![vec!["NOUN", "X", "PUNCT"]];
        assert_eq!(pos_word_accuracy(&gold, &preds, &[vec![0]]).unwrap(), 1.0);
        // all single-token words reduce to plain accuracy
        let gold = vec![vec!["A", "B", "C"]];
        let preds = vec![vec!["A", "X", "C"]];
        assert_eq!(pos_word_accuracy(&gold, &preds, &[vec![0, 1, 2]]).unwrap(), accuracy(&gold[0], &preds[0]).unwrap());
        assert!(pos_word_accuracy(&gold, &preds, &[vec![0, 1, 7]]).is_err());
        assert!(pos_word_accuracy(&gold, &preds, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn mixed_split_fixture() {
        // words: Dnes(1 tok) sme(1) navštívili(3) Bratislavu(2) .(1) -> tokens 0..8
        let gold = vec![vec!["ADV", "AUX", "VERB", "PROPN", "PUNCT"]];
        let preds = vec![vec!["ADV", "VERB", "VERB", "X", "X", "NOUN", "PROPN", "PUNCT"]];
        let align = vec![vec![0, 1, 2, 5, 7]];
        // hand alignment: ADV ok, AUX vs VERB wrong, VERB ok, PROPN vs NOUN wrong, PUNCT ok
        assert_eq!(pos_word_accuracy(&gold, &preds, &align).unwrap(), 3.0 / 5.0);
    }

    #[test]
    fn report_renders() {
        let cm = confusion(&GOLD, &PRED, &CLASSES).unwrap();
        let text = macro_f1(&cm, &CLASSES).unwrap().to_string();
        assert!(text.contains("macro-F1"));
        assert!(text.contains("0.6556"));
    }
}
