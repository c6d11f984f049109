use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{check_dim, FeatureRow};
use super::linear::LinearModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Loss {
    /// Softmax cross-entropy.
    #[default]
    Logistic,
    /// Multi-class hinge (Crammer-Singer).
    Hinge,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheduler {
    #[default]
    Constant,
    Linear,
    CosineWithRestarts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SgdConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub weight_decay: f64,
    pub seed: u64,
    pub loss: Loss,
    /// Only used by the logistic loss.
    pub label_smoothing: f64,
    pub warmup_steps: usize,
    pub scheduler: Scheduler,
    /// Number of cosine cycles after warmup.
    pub cycles: usize,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            epochs: 20,
            batch_size: 16,
            weight_decay: 1e-4,
            seed: 13,
            loss: Loss::Logistic,
            label_smoothing: 0.0,
            warmup_steps: 0,
            scheduler: Scheduler::Constant,
            cycles: 1,
        }
    }
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad(format!("learning_rate {} must be finite and non-negative", self.learning_rate));
        }
        if self.epochs == 0 || self.batch_size == 0 || self.cycles == 0 {
            return bad("epochs, batch_size and cycles must be at least 1".into());
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return bad(format!("weight_decay {} must be non-negative", self.weight_decay));
        }
        if !(0.0..1.0).contains(&self.label_smoothing) {
            return bad(format!("label_smoothing {} must lie in [0, 1)", self.label_smoothing));
        }
        Ok(())
    }

    /// Learning rate at 0-based `step` out of `total` steps.
    pub fn rate_at(&self, step: usize, total: usize) -> f64 {
        let lr = self.learning_rate;
        if step < self.warmup_steps {
            return lr * (step + 1) as f64 / self.warmup_steps as f64;
        }
        let span = total.saturating_sub(self.warmup_steps).max(1) as f64;
        let progress = ((step - self.warmup_steps) as f64 / span).min(1.0);
        match self.scheduler {
            Scheduler::Constant => lr,
            Scheduler::Linear => lr * (1.0 - progress),
            Scheduler::CosineWithRestarts => {
                let phase = (progress * self.cycles as f64).fract();
                lr * 0.5 * (1.0 + (PI * phase).cos())
            }
        }
    }
}

/// Trains with classes in sorted order.
pub fn sgd_train<R: FeatureRow, S: AsRef<str>>(rows: &[R], labels: &[S], dim: usize, cfg: &SgdConfig) -> Result<LinearModel> {
    let classes: BTreeSet<&str> = labels.iter().map(AsRef::as_ref).collect();
    let classes: Vec<String> = classes.into_iter().map(str::to_owned).collect();
    sgd_train_with_classes(rows, labels, &classes, dim, cfg)
}

/// Trains with a fixed class order (which also fixes predict's tie-break).
pub fn sgd_train_with_classes<R: FeatureRow, S: AsRef<str>>(
    rows: &[R],
    labels: &[S],
    classes: &[String],
    dim: usize,
    cfg: &SgdConfig,
) -> Result<LinearModel> {
    train(rows, labels, classes, dim, cfg, false).map(|(m, _)| m)
}

/// Like [`sgd_train`], also returning the training objective (mean loss plus
/// `weight_decay / 2 · ‖W‖²`) before training and after every epoch.
pub fn sgd_train_with_history<R: FeatureRow, S: AsRef<str>>(
    rows: &[R],
    labels: &[S],
    dim: usize,
    cfg: &SgdConfig,
) -> Result<(LinearModel, Vec<f64>)> {
    let classes: BTreeSet<&str> = labels.iter().map(AsRef::as_ref).collect();
    let classes: Vec<String> = classes.into_iter().map(str::to_owned).collect();
    train(rows, labels, &classes, dim, cfg, true)
}

fn train<R: FeatureRow, S: AsRef<str>>(
    rows: &[R],
    labels: &[S],
    classes: &[String],
    dim: usize,
    cfg: &SgdConfig,
    track: bool,
) -> Result<(LinearModel, Vec<f64>)> {
    cfg.validate()?;
    if rows.len() != labels.len() {
        return Err(Error::Dimension { expected: rows.len(), actual: labels.len() });
    }
    let y: Vec<usize> = labels
        .iter()
        .map(|l| {
            classes
                .iter()
                .position(|c| c == l.as_ref())
                .ok_or_else(|| Error::Training(format!("label `{}` is not a known class", l.as_ref())))
        })
        .collect::<Result<_>>()?;
    let present: BTreeSet<usize> = y.iter().copied().collect();
    if present.len() < 2 {
        return Err(Error::Training(format!("need at least two classes in the data, found {}", present.len())));
    }
    for r in rows {
        check_dim(r, dim)?;
    }
    let k = classes.len();
    let mut model = LinearModel::zeros(classes.to_vec(), dim);
    let mut history = Vec::new();
    if track {
        history.push(objective(&model, rows, &y, cfg));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let steps_per_epoch = rows.len().div_ceil(cfg.batch_size);
    let total = steps_per_epoch * cfg.epochs;
    let mut coef = vec![0.0; k];
    let mut batch_coefs: Vec<f64> = Vec::with_capacity(cfg.batch_size * k);
    let mut step = 0;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let lr = cfg.rate_at(step, total);
            step += 1;
            batch_coefs.clear();
            for &i in batch {
                let scores = model.scores_unchecked(&rows[i]);
                loss_gradient(&scores, y[i], cfg, &mut coef);
                batch_coefs.extend_from_slice(&coef);
            }
            if lr == 0.0 {
                continue;
            }
            let shrink = 1.0 - lr * cfg.weight_decay;
            if shrink != 1.0 {
                model.weights.iter_mut().for_each(|w| *w *= shrink);
            }
            let scale = -lr / batch.len() as f64;
            for (&i, g) in batch.iter().zip(batch_coefs.chunks(k)) {
                for (c, &gc) in g.iter().enumerate() {
                    if gc != 0.0 {
                        rows[i].axpy(scale * gc, &mut model.weights[c * dim..(c + 1) * dim]);
                        model.bias[c] += scale * gc;
                    }
                }
            }
        }
        if track {
            history.push(objective(&model, rows, &y, cfg));
        }
    }
    model.validate().map_err(|_| Error::Training("training diverged to non-finite weights".into()))?;
    Ok((model, history))
}

/// Writes `d loss / d score_c` into `grad` and returns the loss.
fn loss_gradient(scores: &[f64], y: usize, cfg: &SgdConfig, grad: &mut [f64]) -> f64 {
    let k = scores.len();
    match cfg.loss {
        Loss::Logistic => {
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for (g, &s) in grad.iter_mut().zip(scores) {
                *g = (s - max).exp();
                z += *g;
            }
            let eps = cfg.label_smoothing;
            let mut loss = 0.0;
            for (c, g) in grad.iter_mut().enumerate() {
                let p = *g / z;
                let q = eps / k as f64 + if c == y { 1.0 - eps } else { 0.0 };
                if q > 0.0 {
                    loss -= q * ((scores[c] - max) - z.ln());
                }
                *g = p - q;
            }
            loss
        }
        Loss::Hinge => {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut rival = None;
            for (c, &s) in scores.iter().enumerate() {
                if c != y && rival.is_none_or(|r: usize| s > scores[r]) {
                    rival = Some(c);
                }
            }
            let Some(r) = rival else { return 0.0 };
            let margin = 1.0 + scores[r] - scores[y];
            if margin > 0.0 {
                grad[r] = 1.0;
                grad[y] = -1.0;
                margin
            } else {
                0.0
            }
        }
    }
}

fn objective<R: FeatureRow>(model: &LinearModel, rows: &[R], y: &[usize], cfg: &SgdConfig) -> f64 {
    let mut grad = vec![0.0; model.classes.len()];
    let data: f64 = rows
        .iter()
        .zip(y)
        .map(|(r, &yi)| loss_gradient(&model.scores_unchecked(r), yi, cfg, &mut grad))
        .sum::<f64>()
        / rows.len() as f64;
    data + 0.5 * cfg.weight_decay * model.weights.iter().map(|w| w * w).sum::<f64>()
}
