//! Per-article checking and corpus-level aggregation.
//!
//! For each candidate abstract: cut it into windows, let the extractive
//! scorer pick at most one span per window, map the spans back onto the
//! abstract, merge them into an evidence context and let the boolean
//! classifier label that context. Articles are processed in parallel on the
//! current rayon pool; the report keeps retrieval order.

mod consensus;
mod evidence;
mod report;

use rayon::prelude::*;
use thiserror::Error;

use crate::claims::ClaimQuery;
use crate::corpus::{retrieve_candidates, Corpus, Document, DEFAULT_RETRIEVAL_LIMIT};
use crate::scorers::{BooleanDistribution, BqaClassifier, EqaScorer, ScorerError, StanceLabel};
use crate::tokenizer2d::{make_windows, remap_to_document, WindowConfig, WindowError};

pub use consensus::{aggregate, Consensus, ConsensusReport, VoteCounts, DEFAULT_BALANCED_MARGIN};
pub use evidence::{merge_highlights, EvidenceContext, Highlight};
pub use report::Fixed6;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("highlight from document {found:?} mixed into evidence for {expected:?}")]
    MixedDocuments { expected: String, found: String },
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
}

impl PipelineError {
    pub fn is_backend(&self) -> bool {
        match self {
            PipelineError::Scorer(e) => e.is_backend(),
            PipelineError::Window(WindowError::SpanOutOfWindow { .. }) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArticleVerdict {
    pub doc_id: String,
    pub evidence: EvidenceContext,
    pub distribution: BooleanDistribution,
    pub label: StanceLabel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub window: WindowConfig,
    pub balanced_margin: f64,
    pub limit: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            window: WindowConfig::default(),
            balanced_margin: DEFAULT_BALANCED_MARGIN,
            limit: DEFAULT_RETRIEVAL_LIMIT,
        }
    }
}

pub fn check_article(
    doc: &Document,
    q: &ClaimQuery,
    cfg: &WindowConfig,
    eqa: &dyn EqaScorer,
    bqa: &dyn BqaClassifier,
) -> Result<ArticleVerdict, PipelineError> {
    let windows = make_windows(doc, cfg)?;
    let question = q.question_text();

    let highlights = windows
        .par_iter()
        .map(|w| -> Result<Option<Highlight>, PipelineError> {
            let answer = eqa.score(question, w)?;
            Ok(remap_to_document(doc, w, &answer)?)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let evidence = merge_highlights(&doc.id, highlights)?;

    let distribution = if evidence.is_empty() {
        BooleanDistribution::NEUTRAL
    } else {
        bqa.classify(question, &evidence.text)?
    };
    Ok(ArticleVerdict {
        doc_id: doc.id.clone(),
        label: distribution.label(),
        distribution,
        evidence,
    })
}

pub fn check_claim(
    corpus: &Corpus,
    q: &ClaimQuery,
    opts: &CheckOptions,
    eqa: &dyn EqaScorer,
    bqa: &dyn BqaClassifier,
) -> Result<ConsensusReport, PipelineError> {
    let candidates = retrieve_candidates(corpus, q, opts.limit);
    let verdicts = candidates
        .par_iter()
        .map(|doc| check_article(doc, q, &opts.window, eqa, bqa))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(q.clone(), verdicts, opts.balanced_margin))
}
