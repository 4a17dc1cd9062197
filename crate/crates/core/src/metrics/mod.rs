//! Evaluation metrics and an offline harness for scoring backends against
//! extractive and boolean datasets.

mod classification;
mod datasets;
mod eval;
mod rouge;
mod span;

use thiserror::Error;

pub use classification::{classification_scores, ClassScores, ClassificationScores};
pub use datasets::{load_boolq, load_squad, BoolExample, EqaExample, GoldAnswer};
pub use eval::{
    aggregate_eqa, evaluate_bqa, evaluate_eqa, predict_eqa, score_eqa_prediction, Aggregates, EvalTask,
    ExampleScores, MetricReport,
};
pub use rouge::{lcs_len, rouge_l, rouge_n, rouge_tokens};
pub use span::{best_overlap, exact_match, normalize_answer, span_recall, token_f1, Overlap};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("{preds} predictions but {golds} gold labels")]
    LengthMismatch { preds: usize, golds: usize },
    #[error("no examples to score")]
    NoExamples,
    #[error("dataset entry {id:?}: {message}")]
    Dataset { id: String, message: String },
    #[error("example {id:?}: {message}")]
    Example { id: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
