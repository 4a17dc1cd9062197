//! Two-way adapter between documents and model inputs.
//!
//! The forward direction cuts a segmented [`Document`] into overlapping
//! sentence windows, each budgeted to a fixed number of word tokens. The
//! reverse direction maps a window-local token span produced by a scorer back
//! onto the document's byte offsets.
//!
//! With `t` sentences per window and a stride (overlap) of `p` sentences the
//! step between window starts is `d = t - p`. A document of `S` sentences gets
//! one window when `S <= t`, otherwise `ceil((S - t) / d) + 1` windows, window
//! `j` covering sentences `d*j ..= min(d*j + t - 1, S - 1)`.

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Document, TokenSpan};
use crate::pipeline::Highlight;

pub const DEFAULT_SENTENCES_PER_WINDOW: usize = 7;
pub const DEFAULT_STRIDE: usize = 0;
pub const DEFAULT_TOKEN_BUDGET: usize = 350;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    #[error("invalid window config: t={t}, p={p}, budget={budget} (need t >= 1, p <= t-1, budget >= 1)")]
    InvalidConfig { t: usize, p: usize, budget: usize },
    #[error("document {0:?} has no sentences")]
    EmptyDocument(String),
    #[error("span {start}..={end} falls outside window {window} of {len} tokens")]
    SpanOutOfWindow {
        window: usize,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("answer for window {answer} applied to window {window}")]
    WindowMismatch { window: usize, answer: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowConfig {
    sentences_per_window: usize,
    stride: usize,
    token_budget: usize,
}

impl WindowConfig {
    pub fn new(t: usize, p: usize, token_budget: usize) -> Result<Self, WindowError> {
        if t == 0 || p >= t || token_budget == 0 {
            return Err(WindowError::InvalidConfig {
                t,
                p,
                budget: token_budget,
            });
        }
        Ok(Self {
            sentences_per_window: t,
            stride: p,
            token_budget,
        })
    }

    pub fn sentences_per_window(&self) -> usize {
        self.sentences_per_window
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn token_budget(&self) -> usize {
        self.token_budget
    }

    /// Distance between consecutive window starts, always >= 1.
    pub fn step(&self) -> usize {
        self.sentences_per_window - self.stride
    }

    pub fn window_count(&self, sentences: usize) -> usize {
        let t = self.sentences_per_window;
        if sentences == 0 {
            0
        } else if sentences <= t {
            1
        } else {
            (sentences - t).div_ceil(self.step()) + 1
        }
    }
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            sentences_per_window: DEFAULT_SENTENCES_PER_WINDOW,
            stride: DEFAULT_STRIDE,
            token_budget: DEFAULT_TOKEN_BUDGET,
        }
    }
}

/// A sentence window borrowing its tokens from the source document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window<'d> {
    pub doc_id: &'d str,
    pub index: usize,
    pub sentence_first: usize,
    pub sentence_last: usize,
    pub tokens: &'d [TokenSpan],
    pub pad_count: usize,
    pub truncated: bool,
}

impl Window<'_> {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token_texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }
}

/// Inclusive token range `start..=end` local to a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenRange {
    pub start: usize,
    pub end: usize,
}

/// A scorer's verdict on one window: either a span or "no answer here".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpanAnswer {
    pub window_index: usize,
    pub span: Option<TokenRange>,
    pub score: f64,
}

impl WindowSpanAnswer {
    pub fn unanswerable(window_index: usize, score: f64) -> Self {
        Self {
            window_index,
            span: None,
            score,
        }
    }

    pub fn answerable(&self) -> bool {
        self.span.is_some()
    }
}

pub fn make_windows<'d>(
    doc: &'d Document,
    cfg: &WindowConfig,
) -> Result<Vec<Window<'d>>, WindowError> {
    let total = doc.sentences.len();
    if total == 0 {
        return Err(WindowError::EmptyDocument(doc.id.clone()));
    }
    let windows = (0..cfg.window_count(total))
        .map(|j| {
            let first = cfg.step() * j;
            let last = (first + cfg.sentences_per_window - 1).min(total - 1);
            let lo = doc.sentence_token_range(first).start;
            let hi = doc.sentence_token_range(last).end;
            let available = hi - lo;
            let budget = cfg.token_budget;
            let (len, pad_count, truncated) = if available > budget {
                (budget, 0, true)
            } else {
                (available, budget - available, false)
            };
            Window {
                doc_id: &doc.id,
                index: j,
                sentence_first: first,
                sentence_last: last,
                tokens: &doc.tokens[lo..lo + len],
                pad_count,
                truncated,
            }
        })
        .collect();
    Ok(windows)
}

/// Maps an answer back to document offsets. `None` when the window had no
/// answer; an error when the span reaches past the window's real tokens.
pub fn remap_to_document(
    doc: &Document,
    window: &Window<'_>,
    answer: &WindowSpanAnswer,
) -> Result<Option<Highlight>, WindowError> {
    if answer.window_index != window.index {
        return Err(WindowError::WindowMismatch {
            window: window.index,
            answer: answer.window_index,
        });
    }
    let Some(span) = answer.span else {
        return Ok(None);
    };
    if span.start > span.end || span.end >= window.tokens.len() {
        return Err(WindowError::SpanOutOfWindow {
            window: window.index,
            start: span.start,
            end: span.end,
            len: window.tokens.len(),
        });
    }
    let char_start = window.tokens[span.start].char_start;
    let char_end = window.tokens[span.end].char_end;
    Ok(Some(Highlight {
        doc_id: doc.id.clone(),
        char_start,
        char_end,
        text: doc.text(char_start, char_end).to_string(),
        score: answer.score,
    }))
}
