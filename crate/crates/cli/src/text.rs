//! Plain-text rendering of a consensus report for terminals.

use std::fmt::Write as _;

use scichk_core::corpus::Document;
use scichk_core::{ConsensusReport, Corpus};

/// Marks the characters of `[lo, hi)` (byte offsets into the document) that
/// fall inside `sentence` with `^`.
fn underline(doc: &Document, sentence: (usize, usize), lo: usize, hi: usize) -> String {
    let text = doc.text(sentence.0, sentence.1);
    let marks: String = text
        .char_indices()
        .map(|(i, _)| {
            let at = sentence.0 + i;
            if at >= lo && at < hi {
                '^'
            } else {
                ' '
            }
        })
        .collect();
    marks.trim_end().to_string()
}

/// Each highlight is shown inside the sentences it touches, with the
/// highlighted characters underlined.
pub fn render_report_text(report: &ConsensusReport, corpus: &Corpus) -> String {
    let mut out = String::new();
    let c = &report.counts;
    let _ = writeln!(out, "Claim: {}", report.claim.question_text());
    let _ = writeln!(
        out,
        "Consensus: {} ({})",
        report.label.as_str().to_uppercase(),
        report.label.description()
    );
    let _ = writeln!(out, "Votes: yes {} | no {} | neutral {}", c.yes, c.no, c.neutral);

    for (rank, article) in report.articles.iter().enumerate() {
        let doc = corpus.get(&article.doc_id);
        let title = doc.map(|d| d.title.as_str()).filter(|t| !t.is_empty()).unwrap_or("(untitled)");
        let d = &article.distribution;
        let _ = writeln!(out);
        let _ = writeln!(out, "[{}] {}  {}", rank + 1, article.doc_id, title);
        let _ = writeln!(
            out,
            "    answer: {}  (yes {:.6}, no {:.6}, neutral {:.6})",
            article.label,
            d.yes(),
            d.no(),
            d.neutral()
        );
        let Some(doc) = doc else { continue };
        if article.evidence.highlights.is_empty() {
            let _ = writeln!(out, "    no passage answers the question");
            continue;
        }
        for h in &article.evidence.highlights {
            for s in doc
                .sentences
                .iter()
                .filter(|s| s.char_start < h.char_end && h.char_start < s.char_end)
            {
                let span = (s.char_start, s.char_end);
                let _ = writeln!(out, "    {}", doc.text(span.0, span.1));
                let _ = writeln!(out, "    {}", underline(doc, span, h.char_start, h.char_end));
            }
        }
    }
    out
}
