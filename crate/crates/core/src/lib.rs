pub mod baselines;
pub mod corpus;
pub mod datasets;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod probing;
pub mod tokenizer;
pub mod text;

pub use error::{Error, Result};
