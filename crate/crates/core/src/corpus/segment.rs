//! Rule-based sentence segmentation for scientific abstracts.

use serde::{Deserialize, Serialize};

/// Sentence boundaries as byte offsets into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSpan {
    pub index: usize,
    #[serde(rename = "start")]
    pub char_start: usize,
    #[serde(rename = "end")]
    pub char_end: usize,
}

/// Lowercased words that end in a period without ending a sentence.
const ABBREVIATIONS: &[&str] = &[
    "al.", "e.g.", "i.e.", "vs.", "cf.", "fig.", "figs.", "eq.", "ref.", "refs.", "dr.", "mr.",
    "mrs.", "ms.", "prof.", "approx.", "ca.", "resp.", "vol.", "pp.", "no.", "nos.", "st.",
    "jr.", "sr.", "inc.", "ltd.", "co.", "spp.", "sp.",
];

const CLOSERS: &[char] = &[')', ']', '"', '\'', '\u{2019}', '\u{201d}'];

/// Splits `text` at `.`, `?` or `!` followed by whitespace and an uppercase
/// letter or digit. Abbreviations, single-letter initials and terminators
/// inside open parentheses or brackets never split. Spans are trimmed of
/// surrounding whitespace; a text without terminators yields one span.
pub fn segment_sentences(text: &str) -> Vec<SentenceSpan> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut depth: i32 = 0;
    let mut i = 0;

    while i < chars.len() {
        let (pos, c) = chars[i];
        if start.is_none() {
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            start = Some(pos);
        }
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth = (depth - 1).max(0),
            _ => {}
        }
        if matches!(c, '.' | '?' | '!') {
            // Absorb trailing terminators and closing brackets/quotes.
            let mut j = i + 1;
            let mut depth_after = depth;
            while j < chars.len() {
                let cj = chars[j].1;
                if matches!(cj, '.' | '?' | '!') {
                    j += 1;
                } else if CLOSERS.contains(&cj) {
                    if matches!(cj, ')' | ']') {
                        depth_after = (depth_after - 1).max(0);
                    }
                    j += 1;
                } else {
                    break;
                }
            }
            let mut k = j;
            while k < chars.len() && chars[k].1.is_whitespace() {
                k += 1;
            }
            let boundary = k > j
                && k < chars.len()
                && starts_sentence(chars[k].1)
                && depth_after == 0
                && !(c == '.' && is_abbreviation(text, pos));
            if boundary {
                let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
                push_span(&mut spans, start.take().unwrap_or(pos), end);
                depth = 0;
                i = k;
                continue;
            }
            // Keep closers we skipped over in the depth count.
            depth = depth_after;
            i = j;
            continue;
        }
        i += 1;
    }

    if let Some(s) = start {
        let end = s + text[s..].trim_end().len();
        push_span(&mut spans, s, end);
    }
    spans
}

fn push_span(spans: &mut Vec<SentenceSpan>, char_start: usize, char_end: usize) {
    if char_start < char_end {
        spans.push(SentenceSpan {
            index: spans.len(),
            char_start,
            char_end,
        });
    }
}

fn starts_sentence(c: char) -> bool {
    c.is_uppercase() || c.is_ascii_digit()
}

/// `period` is the byte offset of a `.`; looks at the whitespace-delimited
/// word that ends with it.
fn is_abbreviation(text: &str, period: usize) -> bool {
    let head = &text[..=period];
    let word_start = head
        .rfind(char::is_whitespace)
        .map_or(0, |p| p + head[p..].chars().next().map_or(1, char::len_utf8));
    let word = head[word_start..].trim_start_matches(['(', '[', '"', '\'']);
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    // Single-letter initials such as "J." in "J. Smith".
    let mut it = word.chars();
    matches!((it.next(), it.next(), it.next()), (Some(l), Some('.'), None) if l.is_uppercase())
}
