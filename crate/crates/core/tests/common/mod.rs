//! Synthetic fixtures shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use skbench::datasets::LabeledText;
use skbench::probing::{Alignment, LayerTensor};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Three news-like topics with disjoint keyword sets plus shared filler.
pub fn topic_corpus(n: usize, seed: u64) -> Vec<LabeledText> {
    const TOPICS: [(&str, &str); 3] = [
        ("negative", "zápas gól tréner liga hráč štadión futbal hokej turnaj medaila"),
        ("neutral", "vláda parlament zákon minister voľby strana koalícia poslanec rezort návrh"),
        ("positive", "banka úrok inflácia akcie trh firma zisk rozpočet dane mzdy"),
    ];
    const FILLER: &str = "a je to že na v sa aj ako ale pre po už tak ešte veľmi dnes";
    let filler: Vec<&str> = FILLER.split(' ').collect();
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            let (label, kw) = TOPICS[i % 3];
            let kw: Vec<&str> = kw.split(' ').collect();
            let mut words: Vec<&str> = (0..r.gen_range(4..10)).map(|_| *kw.choose(&mut r).unwrap()).collect();
            words.extend((0..r.gen_range(4..12)).map(|_| *filler.choose(&mut r).unwrap()));
            words.shuffle(&mut r);
            LabeledText::new(words.join(" "), label)
        })
        .collect()
}

pub fn gaussian(r: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(r)
}

/// Tokens whose class is the argmax of a fixed linear map (the class
/// centroids) applied to the vector itself. Returns the flat `f32` matrix
/// and one label per token.
pub fn planted(n: usize, dim: usize, classes: usize, seed: u64) -> (Vec<f32>, Vec<usize>) {
    let mut r = rng(seed);
    let centroids: Vec<Vec<f64>> = (0..classes).map(|_| (0..dim).map(|_| gaussian(&mut r)).collect()).collect();
    let mut values = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let c = r.gen_range(0..classes);
        let x: Vec<f64> = centroids[c].iter().map(|m| m + 0.5 * gaussian(&mut r)).collect();
        let scores: Vec<f64> = centroids.iter().map(|m| m.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        values.extend(x.iter().map(|&v| v as f32));
        labels.push(best);
    }
    (values, labels)
}

pub fn noise(n: usize, dim: usize, seed: u64) -> Vec<f32> {
    let mut r = rng(seed);
    (0..n * dim).map(|_| gaussian(&mut r) as f32).collect()
}

/// Sentences of `len` one-token words.
pub fn tensor(layer: u32, values: Vec<f32>, dim: usize, len: usize) -> LayerTensor {
    let rows = values.len() / dim;
    LayerTensor::new(layer, rows, dim, values, Alignment::uniform(rows / len, len)).unwrap()
}

pub fn sentence_labels(labels: &[usize], len: usize) -> Vec<Vec<String>> {
    labels.chunks(len).map(|c| c.iter().map(|l| format!("T{l:02}")).collect()).collect()
}
