//! Writes synthetic layer tensors to disk, reads them back and finds the
//! layer whose representations carry the tag information.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skbench::probing::{layerwise_curve, probe_config, read_layer_dir, write_layer_tensor, Alignment, LayerTensor};

const TAGS: [&str; 4] = ["NOUN", "VERB", "ADJ", "ADP"];

fn main() -> skbench::Result<()> {
    let (sentences, len, dim) = (200, 8, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let tags: Vec<usize> = (0..sentences * len).map(|_| rng.gen_range(0..TAGS.len())).collect();

    let dir = tempfile::tempdir().expect("temporary directory");
    for layer in 0..4u32 {
        let values: Vec<f32> = tags
            .iter()
            .flat_map(|&t| {
                (0..dim)
                    .map(|d| {
                        let noise: f32 = rng.gen_range(-1.0..1.0);
                        // layer 2 encodes the tag in its first coordinates
                        if layer == 2 && d == t { noise + 3.0 } else { noise }
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let t = LayerTensor::new(layer, tags.len(), dim, values, Alignment::uniform(sentences, len))?;
        write_layer_tensor(&dir.path().join(format!("layer_{layer:02}.lrep")), &t)?;
    }

    let layers = read_layer_dir(dir.path())?;
    let labels: Vec<Vec<String>> = tags.chunks(len).map(|s| s.iter().map(|&t| TAGS[t].to_string()).collect()).collect();
    let curve = layerwise_curve(&layers, &labels, &probe_config())?;
    for (l, acc) in curve.layers.iter().zip(&curve.per_layer_accuracy) {
        println!("layer {l}: {acc:.3}");
    }
    println!("best layer: {}", curve.best_layer);
    Ok(())
}
