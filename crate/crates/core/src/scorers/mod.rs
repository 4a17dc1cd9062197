//! Contracts for the extractive and boolean scoring stages.
//!
//! Any implementation of [`EqaScorer`] or [`BqaClassifier`] can drive the
//! pipeline. Two deterministic baselines ship in-process
//! ([`LexicalEqa`], [`RuleBqa`]); [`remote`] attaches model servers over HTTP.

mod lexical;
pub mod remote;
mod rules;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tokenizer2d::{TokenRange, Window, WindowError, WindowSpanAnswer};

pub use lexical::{lexical_eqa_score, LexicalEqa, LEXICAL_NA_THRESHOLD};
pub use remote::{RemoteBqa, RemoteClient, RemoteConfig, RemoteEqa};
pub use rules::{
    rule_bqa_classify, CueLexicon, RuleBqa, DEFAULT_NEGATIVE_CUES, DEFAULT_NEGATORS, DEFAULT_POSITIVE_CUES, NEGATION_WINDOW,
    NEUTRAL_FLOOR,
};

pub const DEFAULT_MAX_SPAN_LEN: usize = 100;
pub const SIMPLEX_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("span probability matrix is empty")]
    EmptyMatrix,
    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),
    #[error("backend unreachable at {endpoint} after {attempts} attempts: {reason}")]
    BackendUnreachable {
        endpoint: String,
        attempts: usize,
        reason: String,
    },
    #[error("backend at {endpoint} timed out")]
    BackendTimeout { endpoint: String },
    #[error("backend at {endpoint} answered HTTP {status}: {body}")]
    BackendStatus {
        endpoint: String,
        status: u16,
        body: String,
    },
    #[error("backend protocol violation: {reason}; payload: {payload}")]
    BackendProtocol { reason: String, payload: String },
    #[error(transparent)]
    Window(#[from] WindowError),
}

impl ScorerError {
    pub fn is_backend(&self) -> bool {
        matches!(
            self,
            ScorerError::BackendUnreachable { .. }
                | ScorerError::BackendTimeout { .. }
                | ScorerError::BackendStatus { .. }
                | ScorerError::BackendProtocol { .. }
                | ScorerError::Window(WindowError::SpanOutOfWindow { .. })
        )
    }
}

/// Per-token start/end probabilities for one window plus a no-answer score.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanProbabilities {
    rows: Vec<[f64; 2]>,
    na_score: f64,
}

impl SpanProbabilities {
    pub fn new(rows: Vec<[f64; 2]>, na_score: f64) -> Result<Self, ScorerError> {
        if let Some((i, r)) = rows
            .iter()
            .enumerate()
            .find(|(_, r)| !r.iter().all(|p| (0.0..=1.0).contains(p)))
        {
            return Err(ScorerError::InvalidProbabilities(format!(
                "row {i} = {r:?} outside [0, 1]"
            )));
        }
        if !na_score.is_finite() {
            return Err(ScorerError::InvalidProbabilities(format!(
                "na_score {na_score} is not finite"
            )));
        }
        Ok(Self { rows, na_score })
    }

    pub fn from_columns(start: &[f64], end: &[f64], na_score: f64) -> Result<Self, ScorerError> {
        if start.len() != end.len() {
            return Err(ScorerError::InvalidProbabilities(format!(
                "start has {} rows, end has {}",
                start.len(),
                end.len()
            )));
        }
        Self::new(
            start.iter().zip(end).map(|(&s, &e)| [s, e]).collect(),
            na_score,
        )
    }

    pub fn rows(&self) -> &[[f64; 2]] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn na_score(&self) -> f64 {
        self.na_score
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeParams {
    pub na_threshold: f64,
    pub max_span_len: usize,
}

impl DecodeParams {
    pub fn new(na_threshold: f64) -> Self {
        Self {
            na_threshold,
            max_span_len: DEFAULT_MAX_SPAN_LEN,
        }
    }
}

/// Outcome of decoding one probability matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanDecision {
    pub span: Option<TokenRange>,
    pub score: f64,
}

impl SpanDecision {
    pub fn for_window(self, window_index: usize) -> WindowSpanAnswer {
        WindowSpanAnswer {
            window_index,
            span: self.span,
            score: self.score,
        }
    }
}

pub fn decode_span(probs: &SpanProbabilities, na_threshold: f64) -> Result<SpanDecision, ScorerError> {
    decode_span_with(probs, &DecodeParams::new(na_threshold))
}

/// Picks `(m, M)` maximizing `start[m] * end[M]` with `m <= M <= m + max_span_len`.
///
/// For every end index the best admissible start comes from a monotonic
/// deque over the last `max_span_len + 1` start probabilities, so the scan is
/// linear. Ties go to the smallest end index, then the smallest start. The
/// window is unanswerable when the no-answer score beats the best pair, the
/// best pair is below `na_threshold`, or the best pair has zero probability.
pub fn decode_span_with(probs: &SpanProbabilities, params: &DecodeParams) -> Result<SpanDecision, ScorerError> {
    let rows = probs.rows();
    if rows.is_empty() {
        return Err(ScorerError::EmptyMatrix);
    }
    let mut starts: VecDeque<usize> = VecDeque::new();
    let mut best: Option<(f64, TokenRange)> = None;

    for (end, row) in rows.iter().enumerate() {
        while starts.back().is_some_and(|&b| rows[b][0] < row[0]) {
            starts.pop_back();
        }
        starts.push_back(end);
        while starts
            .front()
            .is_some_and(|&f| end - f > params.max_span_len)
        {
            starts.pop_front();
        }
        let start = starts[0];
        let joint = rows[start][0] * row[1];
        if best.is_none_or(|(b, _)| joint > b) {
            best = Some((joint, TokenRange { start, end }));
        }
    }

    let (score, span) = best.expect("non-empty matrix");
    let answerable = score > 0.0 && probs.na_score() <= score && score >= params.na_threshold;
    Ok(SpanDecision {
        span: answerable.then_some(span),
        score,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StanceLabel {
    Yes,
    No,
    Neutral,
}

impl StanceLabel {
    pub const ALL: [StanceLabel; 3] = [StanceLabel::Yes, StanceLabel::No, StanceLabel::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            StanceLabel::Yes => "yes",
            StanceLabel::No => "no",
            StanceLabel::Neutral => "neutral",
        }
    }
}

impl fmt::Display for StanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StanceLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "yes" => Ok(StanceLabel::Yes),
            "no" => Ok(StanceLabel::No),
            "neutral" | "maybe" => Ok(StanceLabel::Neutral),
            other => Err(format!("unknown label {other:?}")),
        }
    }
}

/// Probability that the claim is supported, refuted, or not addressed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BooleanDistribution {
    yes: f64,
    no: f64,
    neutral: f64,
}

impl BooleanDistribution {
    pub const NEUTRAL: BooleanDistribution = BooleanDistribution {
        yes: 0.0,
        no: 0.0,
        neutral: 1.0,
    };

    pub fn new(yes: f64, no: f64, neutral: f64) -> Result<Self, ScorerError> {
        let parts = [yes, no, neutral];
        if !parts.iter().all(|p| (0.0..=1.0).contains(p)) {
            return Err(ScorerError::InvalidProbabilities(format!(
                "distribution ({yes}, {no}, {neutral}) has a component outside [0, 1]"
            )));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(ScorerError::InvalidProbabilities(format!(
                "distribution ({yes}, {no}, {neutral}) sums to {sum}"
            )));
        }
        Ok(Self { yes, no, neutral })
    }

    pub fn yes(&self) -> f64 {
        self.yes
    }

    pub fn no(&self) -> f64 {
        self.no
    }

    pub fn neutral(&self) -> f64 {
        self.neutral
    }

    /// Most probable label; exact ties resolve yes, then no, then neutral.
    pub fn label(&self) -> StanceLabel {
        if self.yes >= self.no && self.yes >= self.neutral {
            StanceLabel::Yes
        } else if self.no >= self.neutral {
            StanceLabel::No
        } else {
            StanceLabel::Neutral
        }
    }
}

pub trait EqaScorer: Send + Sync {
    fn score(&self, question: &str, window: &Window<'_>) -> Result<WindowSpanAnswer, ScorerError>;
}

pub trait BqaClassifier: Send + Sync {
    fn classify(&self, question: &str, context: &str) -> Result<BooleanDistribution, ScorerError>;
}

impl<T: EqaScorer + ?Sized> EqaScorer for Box<T> {
    fn score(&self, question: &str, window: &Window<'_>) -> Result<WindowSpanAnswer, ScorerError> {
        (**self).score(question, window)
    }
}

impl<T: BqaClassifier + ?Sized> BqaClassifier for Box<T> {
    fn classify(&self, question: &str, context: &str) -> Result<BooleanDistribution, ScorerError> {
        (**self).classify(question, context)
    }
}

impl<T: EqaScorer + ?Sized> EqaScorer for std::sync::Arc<T> {
    fn score(&self, question: &str, window: &Window<'_>) -> Result<WindowSpanAnswer, ScorerError> {
        (**self).score(question, window)
    }
}

impl<T: BqaClassifier + ?Sized> BqaClassifier for std::sync::Arc<T> {
    fn classify(&self, question: &str, context: &str) -> Result<BooleanDistribution, ScorerError> {
        (**self).classify(question, context)
    }
}
