use crate::datasets::StsPair;
use crate::error::{Error, Result};
use crate::metrics::spearman;

/// Cosine similarity; a zero vector on either side gives 0.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Dimension { expected: u.len(), actual: v.len() });
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StsScores {
    pub cosines: Vec<f64>,
    pub spearman: f64,
}

/// Cosine of the two embedded sentences per pair, and Spearman correlation
/// of those cosines with the normalized gold scores.
pub fn sts_score_dataset<F>(pairs: &[StsPair], mut embed: F) -> Result<StsScores>
where
    F: FnMut(&str) -> Vec<f64>,
{
    if pairs.len() < 2 {
        return Err(Error::Metric(format!("STS scoring needs at least two pairs, got {}", pairs.len())));
    }
    let cosines = pairs
        .iter()
        .map(|p| cosine(&embed(&p.sentence_a), &embed(&p.sentence_b)))
        .collect::<Result<Vec<_>>>()?;
    let gold: Vec<f64> = pairs.iter().map(|p| p.score).collect();
    let spearman = spearman(&cosines, &gold)?;
    Ok(StsScores { cosines, spearman })
}
