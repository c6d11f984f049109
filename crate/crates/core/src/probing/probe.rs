use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lrep::LayerTensor;
use crate::baselines::{predict, sgd_train_with_classes, LinearModel, SgdConfig};
use crate::datasets::{split_indices, SplitSpec};
use crate::error::{Error, Result};

/// Default optimizer settings for probes.
pub fn probe_config() -> SgdConfig {
    SgdConfig {
        learning_rate: 0.5,
        epochs: 20,
        batch_size: 32,
        weight_decay: 1e-4,
        ..SgdConfig::default()
    }
}

#[derive(Debug, Clone)]
pub struct ProbeOutcome {
    pub model: LinearModel,
    pub accuracy: f64,
    pub train_size: usize,
    pub test_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub layers: Vec<u32>,
    pub per_layer_accuracy: Vec<f64>,
    /// Layer index with the highest accuracy (lowest index on ties).
    pub best_layer: u32,
}

fn first_token_features(t: &LayerTensor, labels: &[Vec<String>]) -> Result<(Vec<Vec<f64>>, Vec<String>)> {
    let firsts = &t.alignment.word_first_token;
    if firsts.len() != labels.len() {
        return Err(Error::Validation(format!(
            "{} labelled sentences for {} tensor sentences",
            labels.len(),
            firsts.len()
        )));
    }
    let mut rows = Vec::with_capacity(t.alignment.word_count());
    let mut ys = Vec::with_capacity(rows.capacity());
    for (s, (words, tags)) in firsts.iter().zip(labels).enumerate() {
        if words.len() != tags.len() {
            return Err(Error::Validation(format!("sentence {s}: {} words but {} labels", words.len(), tags.len())));
        }
        for (&tok, tag) in words.iter().zip(tags) {
            rows.push(t.row(tok).iter().map(|&v| f64::from(v)).collect());
            ys.push(tag.clone());
        }
    }
    Ok((rows, ys))
}

/// Trains a linear probe on the first-token vector of every word and reports
/// accuracy on a stratified 20% hold-out (seeded by `cfg.seed`).
pub fn train_probe(t: &LayerTensor, labels: &[Vec<String>], cfg: &SgdConfig) -> Result<ProbeOutcome> {
    let (rows, ys) = first_token_features(t, labels)?;
    let spec = SplitSpec { train: 0.8, dev: 0.0, test: 0.2, seed: cfg.seed, stratified: true };
    let idx = split_indices(rows.len(), Some(&ys), &spec)?;
    if idx.test.is_empty() {
        return Err(Error::Validation("too few labelled words for a hold-out split".into()));
    }
    let mut classes = ys.clone();
    classes.sort_unstable();
    classes.dedup();
    let train_rows: Vec<Vec<f64>> = idx.train.iter().map(|&i| rows[i].clone()).collect();
    let train_ys: Vec<&str> = idx.train.iter().map(|&i| ys[i].as_str()).collect();
    let model = sgd_train_with_classes(&train_rows, &train_ys, &classes, t.cols, cfg)?;
    let mut hits = 0;
    for &i in &idx.test {
        if predict(&model, &rows[i])?.label == ys[i] {
            hits += 1;
        }
    }
    Ok(ProbeOutcome {
        model,
        accuracy: hits as f64 / idx.test.len() as f64,
        train_size: idx.train.len(),
        test_size: idx.test.len(),
    })
}

/// One probe per layer, trained in parallel with the same seed.
pub fn layerwise_curve(layers: &[LayerTensor], labels: &[Vec<String>], cfg: &SgdConfig) -> Result<ProbeResult> {
    let first = layers.first().ok_or_else(|| Error::Validation("no layers to probe".into()))?;
    for t in &layers[1..] {
        if t.rows != first.rows || t.alignment != first.alignment {
            return Err(Error::Validation(format!(
                "layer {} alignment differs from layer {}",
                t.layer_index, first.layer_index
            )));
        }
    }
    let mut order: Vec<&LayerTensor> = layers.iter().collect();
    order.sort_by_key(|t| t.layer_index);
    let acc = order
        .par_iter()
        .map(|t| train_probe(t, labels, cfg).map(|o| o.accuracy))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, &a) in acc.iter().enumerate() {
        if a > acc[best] {
            best = i;
        }
    }
    Ok(ProbeResult {
        layers: order.iter().map(|t| t.layer_index).collect(),
        best_layer: order[best].layer_index,
        per_layer_accuracy: acc,
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::probing::Alignment;

    fn noise_layer(layer: u32, n: usize, d: usize, seed: u64) -> LayerTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        LayerTensor::new(layer, n, d, values, Alignment::uniform(n / 10, 10)).unwrap()
    }

    fn labels_from(t: &LayerTensor) -> Vec<Vec<String>> {
        // class = sign of the first coordinate
        t.alignment
            .word_first_token
            .iter()
            .map(|ws| ws.iter().map(|&w| if t.row(w)[0] > 0.0 { "P" } else { "N" }.to_string()).collect())
            .collect()
    }

    #[test]
    fn learns_simple_rule_and_is_deterministic() {
        let t = noise_layer(0, 1000, 4, 1);
        let labels = labels_from(&t);
        let a = train_probe(&t, &labels, &probe_config()).unwrap();
        let b = train_probe(&t, &labels, &probe_config()).unwrap();
        assert!(a.accuracy > 0.95, "{}", a.accuracy);
        assert_eq!(a.accuracy, b.accuracy);
        assert_eq!((a.train_size, a.test_size), (800, 200));
    }

    #[test]
    fn label_mismatch() {
        let t = noise_layer(0, 100, 2, 1);
        let mut labels = labels_from(&t);
        labels[3].pop();
        assert!(train_probe(&t, &labels, &probe_config()).is_err());
        labels.pop();
        assert!(train_probe(&t, &labels, &probe_config()).is_err());
    }

    #[test]
    fn curve_shapes() {
        let t = noise_layer(0, 500, 3, 2);
        let labels = labels_from(&t);
        let single = layerwise_curve(std::slice::from_ref(&t), &labels, &probe_config()).unwrap();
        assert_eq!((single.per_layer_accuracy.len(), single.best_layer), (1, 0));
        let copies: Vec<LayerTensor> = (0..3).map(|l| LayerTensor { layer_index: l, ..t.clone() }).collect();
        let flat = layerwise_curve(&copies, &labels, &probe_config()).unwrap();
        let (lo, hi) = flat.per_layer_accuracy.iter().fold((1.0f64, 0.0f64), |(l, h), &a| (l.min(a), h.max(a)));
        assert!(hi - lo <= 0.01);
        assert_eq!(flat.best_layer, 0);
        let mut other = noise_layer(1, 500, 3, 3);
        other.alignment = Alignment::uniform(100, 5);
        assert!(layerwise_curve(&[t, other], &labels, &probe_config()).is_err());
    }
}
