use serde::{Deserialize, Serialize};

use super::features::{check_dim, FeatureRow};
use crate::error::{Error, Result};

/// Affine multi-class scorer: `score_c = w_c · x + b_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub classes: Vec<String>,
    pub dim: usize,
    /// Row-major, `classes.len() × dim`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(classes: Vec<String>, dim: usize) -> Self {
        let k = classes.len();
        Self { classes, dim, weights: vec![0.0; k * dim], bias: vec![0.0; k] }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.classes.len();
        if k == 0 {
            return Err(Error::Validation("linear model without classes".into()));
        }
        if self.weights.len() != k * self.dim || self.bias.len() != k {
            return Err(Error::Validation(format!(
                "weights {} / bias {} do not fit {k} classes × {} features",
                self.weights.len(),
                self.bias.len(),
                self.dim
            )));
        }
        if self.weights.iter().chain(&self.bias).any(|w| !w.is_finite()) {
            return Err(Error::Validation("linear model has non-finite parameters".into()));
        }
        Ok(())
    }

    pub fn row(&self, class: usize) -> &[f64] {
        &self.weights[class * self.dim..(class + 1) * self.dim]
    }

    /// Per-class scores without a dimension check.
    pub(crate) fn scores_unchecked<R: FeatureRow + ?Sized>(&self, x: &R) -> Vec<f64> {
        (0..self.classes.len()).map(|c| x.dot(self.row(c)) + self.bias[c]).collect()
    }

    pub fn scores<R: FeatureRow + ?Sized>(&self, x: &R) -> Result<Vec<f64>> {
        check_dim(x, self.dim)?;
        Ok(self.scores_unchecked(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: usize,
    pub label: String,
    pub scores: Vec<f64>,
}

/// Index of the first maximum.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Highest-scoring class; ties go to the class listed first.
pub fn predict<R: FeatureRow + ?Sized>(model: &LinearModel, x: &R) -> Result<Prediction> {
    let scores = model.scores(x)?;
    let class = argmax(&scores);
    Ok(Prediction { class, label: model.classes[class].clone(), scores })
}
