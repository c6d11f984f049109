use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lrep::LayerTensor;
use crate::baselines::cosine;
use crate::error::{Error, Result};
use crate::metrics::spearman;

/// Mean of the token vectors of sentence `s`. With `exclude_special` the
/// first and last token of the sentence (`<s>` and `</s>`) are skipped.
pub fn mean_pool(t: &LayerTensor, s: usize, exclude_special: bool) -> Result<Vec<f64>> {
    let &[mut start, mut end] = t
        .alignment
        .sentence_offsets
        .get(s)
        .ok_or_else(|| Error::Validation(format!("sentence {s} out of range")))?;
    if exclude_special {
        start += 1;
        end = end.saturating_sub(1);
    }
    if end <= start {
        return Err(Error::Validation(format!("sentence {s} has no tokens to pool")));
    }
    let mut out = vec![0.0; t.cols];
    for r in start..end {
        for (o, &v) in out.iter_mut().zip(t.row(r)) {
            *o += f64::from(v);
        }
    }
    let n = (end - start) as f64;
    out.iter_mut().for_each(|o| *o /= n);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpearman {
    pub layer: u32,
    pub spearman: f64,
}

/// Per layer: pool sentences `2i` and `2i+1`, take their cosine, and
/// correlate with `gold[i]`.
pub fn sts_layer_analysis(layers: &[LayerTensor], gold: &[f64], exclude_special: bool) -> Result<Vec<LayerSpearman>> {
    layers
        .par_iter()
        .map(|t| {
            let sentences = t.alignment.sentence_offsets.len();
            if sentences != 2 * gold.len() {
                return Err(Error::Validation(format!(
                    "layer {}: {sentences} sentences for {} pairs",
                    t.layer_index,
                    gold.len()
                )));
            }
            let cos = (0..gold.len())
                .map(|i| cosine(&mean_pool(t, 2 * i, exclude_special)?, &mean_pool(t, 2 * i + 1, exclude_special)?))
                .collect::<Result<Vec<f64>>>()?;
            Ok(LayerSpearman { layer: t.layer_index, spearman: spearman(&cos, gold)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probing::Alignment;

    fn tensor(values: Vec<f32>, cols: usize, offsets: Vec<[usize; 2]>) -> LayerTensor {
        let rows = values.len() / cols;
        let alignment = Alignment { sentence_offsets: offsets, word_first_token: vec![] };
        LayerTensor::new(0, rows, cols, values, alignment).unwrap()
    }

    #[test]
    fn pooling() {
        let t = tensor(vec![3.0, 4.0, 2.0, 0.0, 0.0, 2.0], 2, vec![[0, 1], [1, 3]]);
        assert_eq!(mean_pool(&t, 0, false).unwrap(), [3.0, 4.0]);
        assert_eq!(mean_pool(&t, 1, false).unwrap(), [1.0, 1.0]);
        assert!(mean_pool(&t, 0, true).is_err());
        assert!(mean_pool(&t, 2, false).is_err());
    }

    #[test]
    fn seven_token_oracle() {
        let vals: Vec<f32> = (0..21).map(|i| (i as f32 * 0.37).sin()).collect();
        let t = tensor(vals.clone(), 3, vec![[0, 7]]);
        let pooled = mean_pool(&t, 0, false).unwrap();
        for c in 0..3 {
            let col: f64 = (0..7).map(|r| f64::from(vals[r * 3 + c])).sum::<f64>() / 7.0;
            assert!((pooled[c] - col).abs() < 1e-12);
        }
        let inner = mean_pool(&t, 0, true).unwrap();
        let col0: f64 = (1..6).map(|r| f64::from(vals[r * 3])).sum::<f64>() / 5.0;
        assert!((inner[0] - col0).abs() < 1e-12);
    }

    #[test]
    fn pair_count_checked() {
        let t = tensor(vec![1.0; 6], 1, vec![[0, 2], [2, 4], [4, 6]]);
        assert!(sts_layer_analysis(&[t], &[1.0, 2.0], false).is_err());
    }
}
