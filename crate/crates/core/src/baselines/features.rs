use serde::{Deserialize, Serialize};

use crate::text::is_punctuation;

/// Whitespace-separated words with leading and trailing punctuation removed.
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace()
        .map(|w| w.trim_matches(is_punctuation))
        .filter(|w| !w.is_empty())
}

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseVec {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseVec {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            out[i as usize] = v;
        }
        out
    }
}

/// A feature row the linear model can consume.
pub trait FeatureRow {
    /// Smallest dimension that can hold this row.
    fn min_dim(&self) -> usize;
    /// True when the row only fits a model of exactly `min_dim` features.
    fn exact_dim(&self) -> bool;
    fn dot(&self, w: &[f64]) -> f64;
    /// `w += a * self`
    fn axpy(&self, a: f64, w: &mut [f64]);
}

impl FeatureRow for [f64] {
    fn min_dim(&self) -> usize {
        self.len()
    }
    fn exact_dim(&self) -> bool {
        true
    }
    fn dot(&self, w: &[f64]) -> f64 {
        self.iter().zip(w).map(|(x, w)| x * w).sum()
    }
    fn axpy(&self, a: f64, w: &mut [f64]) {
        for (w, x) in w.iter_mut().zip(self) {
            *w += a * x;
        }
    }
}

impl FeatureRow for Vec<f64> {
    fn min_dim(&self) -> usize {
        self.len()
    }
    fn exact_dim(&self) -> bool {
        true
    }
    fn dot(&self, w: &[f64]) -> f64 {
        self.as_slice().dot(w)
    }
    fn axpy(&self, a: f64, w: &mut [f64]) {
        self.as_slice().axpy(a, w)
    }
}

impl FeatureRow for SparseVec {
    fn min_dim(&self) -> usize {
        self.indices.last().map_or(0, |&i| i as usize + 1)
    }
    fn exact_dim(&self) -> bool {
        false
    }
    fn dot(&self, w: &[f64]) -> f64 {
        self.indices.iter().zip(&self.values).map(|(&i, v)| w[i as usize] * v).sum()
    }
    fn axpy(&self, a: f64, w: &mut [f64]) {
        for (&i, v) in self.indices.iter().zip(&self.values) {
            w[i as usize] += a * v;
        }
    }
}

pub(crate) fn check_dim<R: FeatureRow + ?Sized>(row: &R, dim: usize) -> crate::Result<()> {
    let actual = row.min_dim();
    if actual > dim || (row.exact_dim() && actual != dim) {
        return Err(crate::Error::Dimension { expected: dim, actual });
    }
    Ok(())
}
