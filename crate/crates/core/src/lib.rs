//! Claim checking over scientific abstracts.
//!
//! A claim such as "Does hydroxychloroquine cure COVID-19?" is parsed
//! ([`claims`]), matched against an indexed set of abstracts ([`corpus`]),
//! and every candidate is cut into sentence windows ([`tokenizer2d`]). An
//! extractive scorer highlights the passages relevant to the question, a
//! boolean classifier labels the highlights yes/no/neutral ([`scorers`]), and
//! the labels are put to a majority vote ([`pipeline`]). [`metrics`] scores
//! scorer backends against SQuAD- and BoolQ-style datasets.

pub mod claims;
pub mod corpus;
pub mod metrics;
pub mod pipeline;
pub mod scorers;
pub mod synth;
pub mod tokenizer2d;

pub use claims::{parse_claim, render_claim, ClaimError, ClaimQuery, ClaimVerb};
pub use corpus::{retrieve_candidates, AbstractRecord, Corpus, CorpusError, Document};
pub use pipeline::{
    aggregate, check_article, check_claim, merge_highlights, ArticleVerdict, CheckOptions,
    Consensus, ConsensusReport, EvidenceContext, Highlight, PipelineError,
};
pub use scorers::{
    BooleanDistribution, BqaClassifier, EqaScorer, LexicalEqa, RuleBqa, ScorerError, StanceLabel,
};
pub use tokenizer2d::{make_windows, remap_to_document, Window, WindowConfig, WindowSpanAnswer};
