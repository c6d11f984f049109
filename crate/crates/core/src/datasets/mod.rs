//! Readers and task-specific preprocessing for the four benchmark tasks.

mod conllu;
mod labeled;
mod split;
mod sts;
pub mod tagset;

pub use conllu::{
    mapping_violations, parse_conllu, read_conllu, read_conllu_from, write_conllu, ConlluLine,
    ConlluSentence, ConlluWord, MappingViolation, PosExample,
};
pub use labeled::{
    clean_tweet, dedup_labeled, read_labeled, ClassificationTask, LabeledDedupStats, LabeledText,
    ReadStats, DOCCLASS_LABELS, EXCLUDED_DOCCLASS, SENTIMENT_LABELS,
};
pub use split::{split, split_indices, SplitIndices, SplitSpec};
pub use sts::{denormalize_score, normalize_score, read_sts, read_sts_from, StsPair, STS_MAX_SCORE};
pub use tagset::xpos_reduce;
