//! SQuAD-convention answer matching.

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the, collapse
/// whitespace. Same order of steps as the SQuAD evaluation script.
pub fn normalize_answer(s: &str) -> String {
    static ARTICLES: OnceLock<Regex> = OnceLock::new();
    let articles = ARTICLES.get_or_init(|| Regex::new(r"\b(a|an|the)\b").expect("static regex"));
    let lower = s.to_lowercase();
    let no_punct: String = lower.chars().filter(|c| !c.is_ascii_punctuation()).collect();
    let no_articles = articles.replace_all(&no_punct, " ");
    no_articles.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn answer_tokens(s: &str) -> Vec<String> {
    normalize_answer(s)
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

/// Golds for scoring. Golds that normalize to nothing are dropped; with no
/// gold left the example is scored against "".
fn gold_set(golds: &[String]) -> Vec<&str> {
    let kept: Vec<&str> = golds
        .iter()
        .map(String::as_str)
        .filter(|g| !normalize_answer(g).is_empty())
        .collect();
    if kept.is_empty() {
        vec![""]
    } else {
        kept
    }
}

pub fn exact_match(pred: &str, golds: &[String]) -> f64 {
    let pred = normalize_answer(pred);
    let hit = gold_set(golds).iter().any(|g| normalize_answer(g) == pred);
    if hit {
        1.0
    } else {
        0.0
    }
}

/// Token-level precision, recall and F1 of one prediction against one gold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn overlap(pred: &[String], gold: &[String]) -> Overlap {
    if pred.is_empty() || gold.is_empty() {
        let same = if pred.is_empty() && gold.is_empty() { 1.0 } else { 0.0 };
        return Overlap {
            precision: same,
            recall: same,
            f1: same,
        };
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in gold {
        *counts.entry(t).or_default() += 1;
    }
    let mut common = 0usize;
    for t in pred {
        if let Some(c) = counts.get_mut(t.as_str()).filter(|c| **c > 0) {
            *c -= 1;
            common += 1;
        }
    }
    if common == 0 {
        return Overlap {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
        };
    }
    let precision = common as f64 / pred.len() as f64;
    let recall = common as f64 / gold.len() as f64;
    Overlap {
        precision,
        recall,
        f1: 2.0 * precision * recall / (precision + recall),
    }
}

/// Overlap against the gold with the highest F1 (first one on ties).
pub fn best_overlap(pred: &str, golds: &[String]) -> Overlap {
    let pred = answer_tokens(pred);
    let mut best: Option<Overlap> = None;
    for gold in gold_set(golds) {
        let o = overlap(&pred, &answer_tokens(gold));
        if best.is_none_or(|b| o.f1 > b.f1) {
            best = Some(o);
        }
    }
    best.expect("gold set is never empty")
}

pub fn token_f1(pred: &str, golds: &[String]) -> f64 {
    best_overlap(pred, golds).f1
}

/// Share of the best-matching gold's tokens that the prediction covers.
pub fn span_recall(pred: &str, golds: &[String]) -> f64 {
    best_overlap(pred, golds).recall
}
