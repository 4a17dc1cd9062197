use serde::Serialize;

use super::PipelineError;

/// An extracted span in document coordinates (byte offsets).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Highlight {
    #[serde(skip)]
    pub doc_id: String,
    #[serde(rename = "start")]
    pub char_start: usize,
    #[serde(rename = "end")]
    pub char_end: usize,
    pub text: String,
    pub score: f64,
}

/// Ordered, non-overlapping highlights of one document and their
/// space-joined text.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceContext {
    pub doc_id: String,
    pub highlights: Vec<Highlight>,
    pub text: String,
}

impl EvidenceContext {
    pub fn is_empty(&self) -> bool {
        self.highlights.is_empty()
    }
}

/// Sorts spans by start offset and fuses overlapping or touching ones, so
/// repeated extractions of the same passage appear once.
pub fn merge_highlights(doc_id: &str, mut spans: Vec<Highlight>) -> Result<EvidenceContext, PipelineError> {
    if let Some(other) = spans.iter().find(|h| h.doc_id != doc_id) {
        return Err(PipelineError::MixedDocuments {
            expected: doc_id.to_string(),
            found: other.doc_id.clone(),
        });
    }
    spans.sort_by_key(|h| (h.char_start, h.char_end));

    let mut merged: Vec<Highlight> = Vec::with_capacity(spans.len());
    for span in spans {
        match merged.last_mut() {
            Some(last) if span.char_start <= last.char_end => {
                if span.char_end > last.char_end {
                    // Both texts are slices of one document, so the union is
                    // the earlier text plus the later one's tail.
                    let tail_from = last.char_end - span.char_start;
                    last.text.push_str(&span.text[tail_from..]);
                    last.char_end = span.char_end;
                }
                last.score = last.score.max(span.score);
            }
            _ => merged.push(span),
        }
    }

    let text = merged
        .iter()
        .map(|h| h.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    Ok(EvidenceContext {
        doc_id: doc_id.to_string(),
        highlights: merged,
        text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

    fn h(start: usize, end: usize) -> Highlight {
        Highlight {
            doc_id: "d".into(),
            char_start: start,
            char_end: end,
            text: DOC[start..end].to_string(),
            score: start as f64,
        }
    }

    fn offsets(ctx: &EvidenceContext) -> Vec<(usize, usize)> {
        ctx.highlights.iter().map(|h| (h.char_start, h.char_end)).collect()
    }

    #[test]
    fn overlap_union() {
        let ctx = merge_highlights("d", vec![h(10, 20), h(15, 30)]).unwrap();
        assert_eq!(offsets(&ctx), [(10, 30)]);
        assert_eq!(ctx.highlights[0].text, &DOC[10..30]);
        assert_eq!(ctx.highlights[0].score, 15.0);
    }

    #[test]
    fn duplicates_collapse() {
        let ctx = merge_highlights("d", vec![h(10, 20), h(10, 20)]).unwrap();
        assert_eq!(offsets(&ctx), [(10, 20)]);
    }

    #[test]
    fn document_order_and_join() {
        let ctx = merge_highlights("d", vec![h(40, 50), h(10, 20)]).unwrap();
        assert_eq!(offsets(&ctx), [(10, 20), (40, 50)]);
        assert_eq!(ctx.text, format!("{} {}", &DOC[10..20], &DOC[40..50]));
    }

    #[test]
    fn touching_and_contained() {
        let ctx = merge_highlights("d", vec![h(20, 25), h(10, 20), h(12, 14)]).unwrap();
        assert_eq!(offsets(&ctx), [(10, 25)]);
        assert_eq!(ctx.text, &DOC[10..25]);
    }

    #[test]
    fn mixed_documents_rejected() {
        let mut other = h(1, 2);
        other.doc_id = "e".into();
        assert!(matches!(
            merge_highlights("d", vec![h(1, 3), other]),
            Err(PipelineError::MixedDocuments { .. })
        ));
    }

    #[test]
    fn empty_input() {
        let ctx = merge_highlights("d", vec![]).unwrap();
        assert!(ctx.is_empty());
        assert_eq!(ctx.text, "");
    }
}
