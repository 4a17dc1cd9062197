//! Term-overlap extractive baseline.

use std::collections::HashSet;

use super::{decode_span_with, DecodeParams, EqaScorer, ScorerError, SpanProbabilities};
use crate::corpus::terms;
use crate::tokenizer2d::{Window, WindowSpanAnswer};

/// Minimum share of the question's content terms a sentence must contain.
pub const LEXICAL_NA_THRESHOLD: f64 = 0.25;

const QUESTION_STOPWORDS: &[&str] = &[
    "does", "do", "did", "is", "are", "the", "a", "an", "of", "in", "on", "to", "for", "with",
    "and", "or", "by",
];

fn content_terms(question: &str) -> HashSet<String> {
    terms(question)
        .filter(|t| !QUESTION_STOPWORDS.contains(&t.as_str()))
        .collect()
}

/// Scores each sentence lying wholly inside the window by the fraction of
/// question content terms it contains, and answers with the best sentence
/// (earliest on ties).
///
/// The winning sentence's first and last tokens carry `sqrt(overlap)` as their
/// start and end probability, so the decoded joint score is the overlap
/// itself and the 0.25 threshold applies to it directly. The no-answer score
/// is zero: rejection happens purely through the threshold.
pub fn lexical_eqa_score(question: &str, window: &Window<'_>) -> WindowSpanAnswer {
    let unanswerable = WindowSpanAnswer::unanswerable(window.index, 0.0);
    let question_terms = content_terms(question);
    if question_terms.is_empty() || window.is_empty() {
        return unanswerable;
    }

    let mut best: Option<(f64, usize, usize)> = None;
    let mut i = 0;
    while i < window.tokens.len() {
        let sentence = window.tokens[i].sentence_index;
        let mut j = i;
        while j + 1 < window.tokens.len() && window.tokens[j + 1].sentence_index == sentence {
            j += 1;
        }
        // The last sentence may have lost its tail to truncation.
        let complete = !(window.truncated && j + 1 == window.tokens.len());
        if complete {
            let sentence_terms: HashSet<String> = window.tokens[i..=j]
                .iter()
                .flat_map(|t| terms(&t.text))
                .collect();
            let shared = question_terms.intersection(&sentence_terms).count();
            let overlap = shared as f64 / question_terms.len() as f64;
            if best.is_none_or(|(o, _, _)| overlap > o) {
                best = Some((overlap, i, j));
            }
        }
        i = j + 1;
    }

    let Some((overlap, first, last)) = best else {
        return unanswerable;
    };
    let peak = overlap.sqrt();
    let mut rows = vec![[0.0, 0.0]; window.tokens.len()];
    rows[first][0] = peak;
    rows[last][1] = peak;
    let params = DecodeParams {
        na_threshold: LEXICAL_NA_THRESHOLD,
        max_span_len: window.tokens.len(),
    };
    let probs = SpanProbabilities::new(rows, 0.0).expect("peaks lie in [0, 1]");
    decode_span_with(&probs, &params)
        .expect("window is non-empty")
        .for_window(window.index)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LexicalEqa;

impl EqaScorer for LexicalEqa {
    fn score(&self, question: &str, window: &Window<'_>) -> Result<WindowSpanAnswer, ScorerError> {
        Ok(lexical_eqa_score(question, window))
    }
}
