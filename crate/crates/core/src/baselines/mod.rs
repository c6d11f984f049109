//! Classical baselines: TF-IDF n-gram features, averaged word embeddings,
//! a linear classifier trained with mini-batch SGD, and cosine STS scoring.

mod embed;
mod features;
mod linear;
mod persist;
mod sgd;
mod sts;
mod tfidf;

pub use embed::{avg_embed, EmbeddingTable};
pub use features::{words, FeatureRow, SparseVec};
pub use linear::{predict, LinearModel, Prediction};
pub use persist::{load_linear_model, read_linear_model, save_linear_model, write_linear_model, SLBM_VERSION};
pub use sgd::{sgd_train, sgd_train_with_classes, sgd_train_with_history, Loss, Scheduler, SgdConfig};
pub use sts::{cosine, sts_score_dataset, StsScores};
pub use tfidf::{tfidf_fit, TfidfModel};
