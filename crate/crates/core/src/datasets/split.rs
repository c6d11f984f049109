//! Seeded train/dev/test partitioning.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub dev: f64,
    pub test: f64,
    pub seed: u64,
    #[serde(default = "default_stratified")]
    pub stratified: bool,
}

fn default_stratified() -> bool {
    true
}

impl Default for SplitSpec {
    /// Stratified 80/10/10 with seed 13.
    fn default() -> Self {
        Self {
            train: 0.8,
            dev: 0.1,
            test: 0.1,
            seed: 13,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn new(train: f64, dev: f64, test: f64, seed: u64) -> Self {
        Self {
            train,
            dev,
            test,
            seed,
            stratified: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ratios = [self.train, self.dev, self.test];
        if ratios.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::Config(format!("split ratios {ratios:?} must lie in [0, 1]")));
        }
        let sum: f64 = ratios.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split ratios sum to {sum}, expected 1")));
        }
        Ok(())
    }

    /// Part sizes for `n` items by the largest-remainder rule.
    pub fn sizes(&self, n: usize) -> [usize; 3] {
        let quotas = [self.train, self.dev, self.test].map(|r| r * n as f64);
        let mut sizes = quotas.map(|q| q.floor() as usize);
        let mut left = n.saturating_sub(sizes.iter().sum());
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            let fa = quotas[a] - quotas[a].floor();
            let fb = quotas[b] - quotas[b].floor();
            fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
        });
        for &i in order.iter().cycle() {
            if left == 0 {
                break;
            }
            sizes[i] += 1;
            left -= 1;
        }
        sizes
    }
}

/// Indices of the three parts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub dev: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded shuffle followed by a contiguous partition. With `labels` and a
/// stratified spec, each class is partitioned separately so every part
/// keeps the class proportions.
pub fn split_indices(n: usize, labels: Option<&[String]>, spec: &SplitSpec) -> Result<SplitIndices> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = SplitIndices::default();
    match labels {
        Some(labels) if spec.stratified => {
            if labels.len() != n {
                return Err(Error::Dimension { expected: n, actual: labels.len() });
            }
            let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, l) in labels.iter().enumerate() {
                by_class.entry(l).or_default().push(i);
            }
            for mut members in by_class.into_values() {
                members.shuffle(&mut rng);
                partition_into(&members, spec, &mut out);
            }
            out.train.shuffle(&mut rng);
            out.dev.shuffle(&mut rng);
            out.test.shuffle(&mut rng);
        }
        _ => {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut rng);
            partition_into(&all, spec, &mut out);
        }
    }
    Ok(out)
}

fn partition_into(items: &[usize], spec: &SplitSpec, out: &mut SplitIndices) {
    let [a, b, _] = spec.sizes(items.len());
    out.train.extend_from_slice(&items[..a]);
    out.dev.extend_from_slice(&items[a..a + b]);
    out.test.extend_from_slice(&items[a + b..]);
}

/// Splits items, optionally stratified by `label_of`.
pub fn split<T: Clone>(
    items: &[T],
    label_of: Option<&dyn Fn(&T) -> String>,
    spec: &SplitSpec,
) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    let labels: Option<Vec<String>> = label_of.map(|f| items.iter().map(f).collect());
    let idx = split_indices(items.len(), labels.as_deref(), spec)?;
    let pick = |ids: &[usize]| ids.iter().map(|&i| items[i].clone()).collect();
    Ok((pick(&idx.train), pick(&idx.dev), pick(&idx.test)))
}
