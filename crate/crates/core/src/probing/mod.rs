//! Linear probes over per-layer token representations exported by an
//! external model, and mean-pooled sentence embeddings per layer.

mod lrep;
mod pool;
mod probe;

pub use lrep::{
    decode_lrep, encode_lrep, read_layer_dir, read_layer_tensor, sidecar_path, write_layer_tensor,
    Alignment, LayerTensor, LREP_VERSION,
};
pub use pool::{mean_pool, sts_layer_analysis, LayerSpearman};
pub use probe::{layerwise_curve, probe_config, train_probe, ProbeOutcome, ProbeResult};
