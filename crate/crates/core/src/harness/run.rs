use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;

use super::config::{ModelKind, RunConfig, Tagset, Task};
use super::report::EvalReport;
use crate::baselines::{
    avg_embed, cosine, predict, sgd_train_with_classes, sts_score_dataset, tfidf_fit, words,
    write_linear_model, EmbeddingTable, LinearModel, TfidfModel,
};
use crate::datasets::{
    clean_tweet, dedup_labeled, read_conllu, read_labeled, read_sts, split_indices, ClassificationTask,
    LabeledText, StsPair,
};
use crate::error::{Error, Result};
use crate::metrics::{
    accuracy, confusion, macro_f1, pos_word_accuracy, read_label_predictions, read_token_predictions, spearman,
    two_class_macro_f1,
};
use crate::probing::{layerwise_curve, read_layer_dir, Alignment};

/// Metrics of one run plus the files to store next to them.
#[derive(Debug, Clone, Default)]
pub struct Evaluation {
    pub metrics: BTreeMap<String, f64>,
    pub artifacts: Vec<(String, Vec<u8>)>,
}

/// Validates and evaluates `cfg` without touching the run directory.
pub fn evaluate(cfg: &RunConfig) -> Result<Evaluation> {
    cfg.validate()?;
    match cfg.task {
        Task::Pos => eval_pos(cfg),
        Task::Sts => eval_sts(cfg),
        Task::Sentiment | Task::Docclass => eval_classification(cfg),
        Task::Probe => eval_probe(cfg),
    }
}

/// Evaluates `cfg` and writes `config.json`, the artifacts, `metrics.json`
/// and `report.json` into its run directory.
pub fn run_task(cfg: &RunConfig) -> Result<EvalReport> {
    let eval = evaluate(cfg)?;
    let dir = cfg.run_directory();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let write = |name: &str, bytes: &[u8]| {
        let p = dir.join(name);
        fs::write(&p, bytes).map_err(|e| Error::io(&p, e))
    };
    write("config.json", &serde_json::to_vec_pretty(cfg)?)?;
    for (name, bytes) in &eval.artifacts {
        write(name, bytes)?;
    }
    let report = EvalReport {
        task: cfg.task,
        model: cfg.model_name(),
        metrics: eval.metrics,
        config_digest: cfg.digest(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    write("metrics.json", &serde_json::to_vec_pretty(&report.metrics)?)?;
    write("report.json", &serde_json::to_vec_pretty(&report)?)?;
    log::info!("run written to {}", dir.display());
    Ok(report)
}

fn read_labeled_file(path: &Path, task: ClassificationTask) -> Result<Vec<LabeledText>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(read_labeled(BufReader::new(f), task)?.0)
}

struct Parts<T> {
    train: Vec<T>,
    dev: Vec<T>,
    test: Vec<T>,
}

fn labeled_parts(cfg: &RunConfig, task: ClassificationTask) -> Result<Parts<LabeledText>> {
    let prep = |mut items: Vec<LabeledText>| {
        if task == ClassificationTask::Sentiment {
            for it in &mut items {
                it.text = clean_tweet(&it.text);
            }
            items.retain(|it| !it.text.is_empty());
            items = dedup_labeled(&items).0;
        }
        items
    };
    let d = &cfg.data;
    if let (Some(train), Some(test)) = (&d.train, &d.test) {
        let dev = match &d.dev {
            Some(p) => prep(read_labeled_file(p, task)?),
            None => Vec::new(),
        };
        return Ok(Parts {
            train: prep(read_labeled_file(train, task)?),
            dev,
            test: prep(read_labeled_file(test, task)?),
        });
    }
    let input = d.input.as_ref().ok_or_else(|| Error::Config("missing data.input".into()))?;
    let items = prep(read_labeled_file(input, task)?);
    let labels: Vec<String> = items.iter().map(|i| i.label.clone()).collect();
    let idx = split_indices(items.len(), Some(&labels), &cfg.effective_split())?;
    let pick = |ids: &[usize]| ids.iter().map(|&i| items[i].clone()).collect();
    Ok(Parts { train: pick(&idx.train), dev: pick(&idx.dev), test: pick(&idx.test) })
}

fn classification_metrics(
    cfg: &RunConfig,
    task: ClassificationTask,
    gold: &[&str],
    pred: &[&str],
    prefix: &str,
    out: &mut BTreeMap<String, f64>,
) -> Result<()> {
    let classes = task.labels();
    out.insert(format!("{prefix}accuracy"), accuracy(gold, pred)?);
    let cm = confusion(gold, pred, classes)?;
    let all = macro_f1(&cm, classes)?;
    for flagged in all.flagged() {
        log::warn!("{prefix}F1 for class {flagged} has a zero denominator and counts as 0");
    }
    match task {
        ClassificationTask::Sentiment => {
            out.insert(format!("{prefix}macro_f1_3"), all.macro_f1);
            let two = two_class_macro_f1(gold, pred, classes, "positive", "negative", "neutral", cfg.two_class_mode)?;
            out.insert(format!("{prefix}macro_f1_2"), two.macro_f1);
        }
        ClassificationTask::Docclass => {
            out.insert(format!("{prefix}macro_f1"), all.macro_f1);
        }
    }
    Ok(())
}

fn predictions_tsv(items: &[LabeledText], pred: &[&str]) -> Vec<u8> {
    let mut s = String::from("id\tgold\tpredicted\n");
    for (i, (it, p)) in items.iter().zip(pred).enumerate() {
        s.push_str(&format!("{i}\t{}\t{p}\n", it.label));
    }
    s.into_bytes()
}

fn eval_classification(cfg: &RunConfig) -> Result<Evaluation> {
    let task = cfg.task.classification().expect("classification task");
    let mut eval = Evaluation::default();
    if cfg.model_kind == ModelKind::ExternalPredictions {
        let gold_path = cfg.data.test.as_ref().or(cfg.data.input.as_ref()).expect("validated");
        let gold = read_labeled_file(gold_path, task)?;
        let preds = read_predictions_by_id(cfg.data.predictions.as_ref().expect("validated"), gold.len())?;
        let g: Vec<&str> = gold.iter().map(|i| i.label.as_str()).collect();
        let p: Vec<&str> = preds
            .iter()
            .map(|raw| {
                task.canonical_label(raw)
                    .ok_or_else(|| Error::Validation(format!("predicted label `{raw}` is not a {task} class")))
            })
            .collect::<Result<_>>()?;
        classification_metrics(cfg, task, &g, &p, "", &mut eval.metrics)?;
        return Ok(eval);
    }

    let parts = labeled_parts(cfg, task)?;
    if parts.train.is_empty() || parts.test.is_empty() {
        return Err(Error::Validation("train or test part is empty".into()));
    }
    let classes: Vec<String> = task.labels().iter().map(|s| s.to_string()).collect();
    let sgd = cfg.effective_sgd();
    let train_labels: Vec<&str> = parts.train.iter().map(|i| i.label.as_str()).collect();
    let (model, featurizer) = match cfg.model_kind {
        ModelKind::BaselineTfidf => {
            let texts: Vec<&str> = parts.train.iter().map(|i| i.text.as_str()).collect();
            let tfidf = tfidf_fit(&texts, cfg.tfidf.ngram_range, cfg.tfidf.min_count)?;
            let rows: Vec<_> = texts.iter().map(|t| tfidf.transform(t)).collect();
            let model = sgd_train_with_classes(&rows, &train_labels, &classes, tfidf.dim(), &sgd)?;
            eval.artifacts.push(("tfidf.json".into(), serde_json::to_vec(&tfidf)?));
            (model, Featurizer::Tfidf(tfidf))
        }
        ModelKind::BaselineAvgvec => {
            let vocab: HashSet<String> = parts
                .train
                .iter()
                .chain(&parts.dev)
                .chain(&parts.test)
                .flat_map(|i| words(&i.text).map(str::to_owned).collect::<Vec<_>>())
                .collect();
            let table = EmbeddingTable::load_filtered(cfg.data.embeddings.as_ref().expect("validated"), &vocab)?;
            let rows: Vec<Vec<f64>> = parts.train.iter().map(|i| avg_embed(&i.text, &table)).collect();
            let model = sgd_train_with_classes(&rows, &train_labels, &classes, table.dim(), &sgd)?;
            (model, Featurizer::Avg(table))
        }
        other => unreachable!("{other:?} rejected by validation"),
    };
    let mut slbm = Vec::new();
    write_linear_model(&model, &mut slbm)?;
    eval.artifacts.push(("model.slbm".into(), slbm));
    for (prefix, items) in [("dev_", &parts.dev), ("", &parts.test)] {
        if items.is_empty() {
            continue;
        }
        let pred: Vec<String> = items
            .iter()
            .map(|i| featurizer.predict(&model, &i.text))
            .collect::<Result<_>>()?;
        let p: Vec<&str> = pred.iter().map(String::as_str).collect();
        let g: Vec<&str> = items.iter().map(|i| i.label.as_str()).collect();
        classification_metrics(cfg, task, &g, &p, prefix, &mut eval.metrics)?;
        let name = if prefix.is_empty() { "predictions_test.tsv" } else { "predictions_dev.tsv" };
        eval.artifacts.push((name.into(), predictions_tsv(items, &p)));
    }
    Ok(eval)
}

enum Featurizer {
    Tfidf(TfidfModel),
    Avg(EmbeddingTable),
}

impl Featurizer {
    fn predict(&self, model: &LinearModel, text: &str) -> Result<String> {
        Ok(match self {
            Featurizer::Tfidf(m) => predict(model, &m.transform(text))?.label,
            Featurizer::Avg(t) => predict(model, &avg_embed(text, t))?.label,
        })
    }
}

/// Predictions keyed by 0-based item index; every item must be covered.
fn read_predictions_by_id(path: &Path, n: usize) -> Result<Vec<String>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let records = read_label_predictions(BufReader::new(f))?;
    let mut by_id: HashMap<usize, String> = HashMap::new();
    for (id, label) in records {
        let i: usize = id
            .trim()
            .parse()
            .map_err(|_| Error::Validation(format!("prediction id `{id}` is not an item index")))?;
        if i >= n {
            return Err(Error::Validation(format!("prediction id {i} beyond {n} gold items")));
        }
        if by_id.insert(i, label).is_some() {
            return Err(Error::Validation(format!("prediction id {i} appears twice")));
        }
    }
    (0..n)
        .map(|i| by_id.remove(&i).ok_or_else(|| Error::Validation(format!("no prediction for item {i}"))))
        .collect()
}

fn eval_pos(cfg: &RunConfig) -> Result<Evaluation> {
    let gold_path = cfg.data.test.as_ref().or(cfg.data.input.as_ref()).expect("validated");
    let gold = read_conllu(gold_path)?;
    let tags: Vec<Vec<String>> = gold
        .iter()
        .map(|ex| match cfg.tagset {
            Tagset::Upos => ex.upos.clone(),
            Tagset::Xpos => ex.xpos.iter().map(char::to_string).collect(),
        })
        .collect();
    let pred_path = cfg.data.predictions.as_ref().expect("validated");
    let f = File::open(pred_path).map_err(|e| Error::io(pred_path, e))?;
    let preds = read_token_predictions(BufReader::new(f))?;
    let firsts: Vec<Vec<usize>> = match &cfg.data.alignment {
        Some(p) => {
            let text = fs::read(p).map_err(|e| Error::io(p, e))?;
            let a: Alignment = serde_json::from_slice(&text)?;
            if a.sentence_offsets.len() != a.word_first_token.len() {
                return Err(Error::Validation("alignment sentence and word lists differ in length".into()));
            }
            a.word_first_token
                .iter()
                .zip(&a.sentence_offsets)
                .map(|(ws, &[start, _])| ws.iter().map(|&w| w.saturating_sub(start)).collect())
                .collect()
        }
        None => tags.iter().map(|s| (0..s.len()).collect()).collect(),
    };
    let mut eval = Evaluation::default();
    eval.metrics.insert("accuracy".into(), pos_word_accuracy(&tags, &preds, &firsts)?);
    Ok(eval)
}

fn sts_parts(cfg: &RunConfig) -> Result<(Vec<StsPair>, Vec<StsPair>)> {
    let test = read_sts(cfg.data.test.as_ref().or(cfg.data.input.as_ref()).expect("validated"))?;
    let dev = match &cfg.data.dev {
        Some(p) => read_sts(p)?,
        None => Vec::new(),
    };
    Ok((dev, test))
}

fn cosines_tsv(cos: &[f64]) -> Vec<u8> {
    cos.iter().map(|c| format!("{c}\n")).collect::<String>().into_bytes()
}

fn eval_sts(cfg: &RunConfig) -> Result<Evaluation> {
    let (dev, test) = sts_parts(cfg)?;
    let mut eval = Evaluation::default();
    let emb_path = cfg.data.embeddings.as_ref().expect("validated");
    match cfg.model_kind {
        ModelKind::BaselineStsvec => {
            let vocab: HashSet<String> = dev
                .iter()
                .chain(&test)
                .flat_map(|p| words(&p.sentence_a).chain(words(&p.sentence_b)).map(str::to_owned).collect::<Vec<_>>())
                .collect();
            let table = EmbeddingTable::load_filtered(emb_path, &vocab)?;
            for (prefix, pairs) in [("dev_", &dev), ("", &test)] {
                if pairs.is_empty() {
                    continue;
                }
                let r = sts_score_dataset(pairs, |s| avg_embed(s, &table))?;
                eval.metrics.insert(format!("{prefix}spearman"), r.spearman);
                if prefix.is_empty() {
                    eval.artifacts.push(("cosines_test.txt".into(), cosines_tsv(&r.cosines)));
                }
            }
        }
        ModelKind::ExternalEmbeddings => {
            let text = fs::read_to_string(emb_path).map_err(|e| Error::io(emb_path, e))?;
            let vectors = text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
                .map(|(n, l)| {
                    l.split_whitespace()
                        .map(|v| v.parse::<f64>().map_err(|_| Error::parse(n + 1, format!("bad number `{v}`"))))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            if vectors.len() != 2 * test.len() {
                return Err(Error::Validation(format!(
                    "{} sentence vectors for {} pairs (expected two per pair)",
                    vectors.len(),
                    test.len()
                )));
            }
            let cos = vectors.chunks(2).map(|p| cosine(&p[0], &p[1])).collect::<Result<Vec<_>>>()?;
            let gold: Vec<f64> = test.iter().map(|p| p.score).collect();
            eval.metrics.insert("spearman".into(), spearman(&cos, &gold)?);
            eval.artifacts.push(("cosines_test.txt".into(), cosines_tsv(&cos)));
        }
        other => unreachable!("{other:?} rejected by validation"),
    }
    Ok(eval)
}

fn eval_probe(cfg: &RunConfig) -> Result<Evaluation> {
    let layers = read_layer_dir(cfg.data.layers.as_ref().expect("validated"))?;
    let gold = read_conllu(cfg.data.labels.as_ref().expect("validated"))?;
    let labels: Vec<Vec<String>> = gold
        .into_iter()
        .map(|ex| match cfg.tagset {
            Tagset::Upos => ex.upos,
            Tagset::Xpos => ex.xpos.iter().map(char::to_string).collect(),
        })
        .collect();
    let curve = layerwise_curve(&layers, &labels, &cfg.effective_sgd())?;
    let mut eval = Evaluation::default();
    for (l, a) in curve.layers.iter().zip(&curve.per_layer_accuracy) {
        eval.metrics.insert(format!("layer_{l:02}"), *a);
    }
    let best = curve.per_layer_accuracy.iter().copied().fold(0.0, f64::max);
    eval.metrics.insert("best_accuracy".into(), best);
    eval.metrics.insert("best_layer".into(), f64::from(curve.best_layer));
    eval.artifacts.push(("probe_curve.json".into(), serde_json::to_vec_pretty(&curve)?));
    Ok(eval)
}
