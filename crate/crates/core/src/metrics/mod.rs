//! Evaluation measures: accuracy, confusion counts, per-class and macro F1
//! (with the positive/negative-only variant) and Spearman correlation.

mod classification;
mod correlation;
mod io;

pub use classification::{
    accuracy, confusion, macro_f1, pos_word_accuracy, two_class_macro_f1, ClassScores,
    ConfusionCounts, F1Report, TwoClassMode,
};
pub use correlation::{average_ranks, pearson, spearman};
pub use io::{read_label_predictions, read_token_predictions};
