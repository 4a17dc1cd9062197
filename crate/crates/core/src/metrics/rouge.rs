//! ROUGE-N and ROUGE-L F1 over lowercase alphanumeric tokens, without
//! stemming or stopword removal.

use std::collections::HashMap;

pub fn rouge_tokens(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn f1(overlap: usize, pred_len: usize, ref_len: usize) -> f64 {
    if overlap == 0 || pred_len == 0 || ref_len == 0 {
        return 0.0;
    }
    let p = overlap as f64 / pred_len as f64;
    let r = overlap as f64 / ref_len as f64;
    2.0 * p * r / (p + r)
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if n > 0 && tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_default() += 1;
        }
    }
    counts
}

/// ROUGE-N F1 on the multiset of n-grams.
pub fn rouge_n(pred: &str, reference: &str, n: usize) -> f64 {
    let pred = rouge_tokens(pred);
    let reference = rouge_tokens(reference);
    let p = ngram_counts(&pred, n);
    let r = ngram_counts(&reference, n);
    let overlap: usize = p
        .iter()
        .map(|(gram, &c)| c.min(r.get(gram).copied().unwrap_or(0)))
        .sum();
    f1(overlap, p.values().sum(), r.values().sum())
}

/// Length of the longest common subsequence, two-row dynamic programme.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L F1 from the token LCS.
pub fn rouge_l(pred: &str, reference: &str) -> f64 {
    let pred = rouge_tokens(pred);
    let reference = rouge_tokens(reference);
    f1(lcs_len(&pred, &reference), pred.len(), reference.len())
}
