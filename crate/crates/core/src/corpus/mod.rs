//! Abstract storage, term index and candidate retrieval.

mod segment;

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::claims::ClaimQuery;

pub use segment::{segment_sentences, SentenceSpan};

/// Default number of candidates returned for a claim.
pub const DEFAULT_RETRIEVAL_LIMIT: usize = 100;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("document {0:?} has an empty abstract")]
    EmptyAbstract(String),
    #[error("document id is empty")]
    EmptyId,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One line of a corpus JSONL file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractRecord {
    pub id: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
}

/// A whitespace-delimited token; offsets are byte offsets into the abstract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenSpan {
    pub text: String,
    pub char_start: usize,
    pub char_end: usize,
    pub sentence_index: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Document {
    pub id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    #[serde(rename = "url", skip_serializing_if = "Option::is_none")]
    pub source_url: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    pub sentences: Vec<SentenceSpan>,
    #[serde(skip)]
    pub tokens: Vec<TokenSpan>,
}

impl Document {
    /// Segments and tokenizes the record. Tokens never straddle sentences
    /// because they are split inside each sentence span.
    pub fn from_record(record: AbstractRecord) -> Result<Self, CorpusError> {
        if record.id.trim().is_empty() {
            return Err(CorpusError::EmptyId);
        }
        let sentences = segment_sentences(&record.abstract_text);
        if sentences.is_empty() {
            return Err(CorpusError::EmptyAbstract(record.id));
        }
        let tokens = sentences
            .iter()
            .flat_map(|s| tokenize_range(&record.abstract_text, s))
            .collect();
        Ok(Self {
            id: record.id,
            title: record.title.unwrap_or_default(),
            abstract_text: record.abstract_text,
            source_url: record.url,
            year: record.year,
            sentences,
            tokens,
        })
    }

    pub fn text(&self, start: usize, end: usize) -> &str {
        &self.abstract_text[start..end]
    }

    /// Index range into `tokens` covering sentence `index`.
    pub fn sentence_token_range(&self, index: usize) -> std::ops::Range<usize> {
        let lo = self.tokens.partition_point(|t| t.sentence_index < index);
        let hi = self.tokens.partition_point(|t| t.sentence_index <= index);
        lo..hi
    }
}

fn tokenize_range(text: &str, sentence: &SentenceSpan) -> Vec<TokenSpan> {
    let slice = &text[sentence.char_start..sentence.char_end];
    let mut tokens = Vec::new();
    let mut current: Option<usize> = None;
    for (i, c) in slice.char_indices() {
        match (c.is_whitespace(), current) {
            (false, None) => current = Some(i),
            (true, Some(s)) => {
                tokens.push(make_token(text, sentence, s, i));
                current = None;
            }
            _ => {}
        }
    }
    if let Some(s) = current {
        tokens.push(make_token(text, sentence, s, slice.len()));
    }
    tokens
}

fn make_token(text: &str, sentence: &SentenceSpan, lo: usize, hi: usize) -> TokenSpan {
    let char_start = sentence.char_start + lo;
    let char_end = sentence.char_start + hi;
    TokenSpan {
        text: text[char_start..char_end].to_string(),
        char_start,
        char_end,
        sentence_index: sentence.index,
    }
}

/// Lowercases and strips leading/trailing non-alphanumeric characters.
/// Internal punctuation survives, so "COVID-19." becomes "covid-19".
pub fn normalize_term(token: &str) -> String {
    token
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

/// Normalized, non-empty terms of a piece of text, in order.
pub fn terms(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split_whitespace()
        .map(normalize_term)
        .filter(|t| !t.is_empty())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    doc: usize,
    pub term_frequency: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub ingested: usize,
    pub skipped: usize,
}

/// Parsed corpus plus the per-line problems encountered while loading it.
#[derive(Debug, Default)]
pub struct LoadReport {
    pub stats: LoadStats,
    pub errors: Vec<CorpusError>,
}

#[derive(Debug, Default, Clone)]
pub struct Corpus {
    documents: Vec<Document>,
    by_id: HashMap<String, usize>,
    term_index: HashMap<String, Vec<Posting>>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.by_id.get(id).map(|&i| &self.documents[i])
    }

    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.documents.iter()
    }

    /// Postings for an already-normalized term as `(doc id, tf)` pairs.
    pub fn postings(&self, term: &str) -> impl Iterator<Item = (&str, u32)> {
        self.term_index
            .get(term)
            .into_iter()
            .flatten()
            .map(|p| (self.documents[p.doc].id.as_str(), p.term_frequency))
    }

    pub fn vocabulary_len(&self) -> usize {
        self.term_index.len()
    }

    pub fn ingest(&mut self, record: AbstractRecord) -> Result<&Document, CorpusError> {
        if record.abstract_text.trim().is_empty() {
            return Err(CorpusError::EmptyAbstract(record.id));
        }
        if self.by_id.contains_key(&record.id) {
            return Err(CorpusError::DuplicateId(record.id));
        }
        let doc = Document::from_record(record)?;
        let slot = self.documents.len();

        let mut tf: HashMap<String, u32> = HashMap::new();
        for tok in &doc.tokens {
            let term = normalize_term(&tok.text);
            if !term.is_empty() {
                *tf.entry(term).or_default() += 1;
            }
        }
        for (term, term_frequency) in tf {
            self.term_index.entry(term).or_default().push(Posting {
                doc: slot,
                term_frequency,
            });
        }
        self.by_id.insert(doc.id.clone(), slot);
        self.documents.push(doc);
        Ok(&self.documents[slot])
    }

    /// Ingests every line of a JSONL stream. Malformed lines, duplicates and
    /// empty abstracts are skipped and reported with their 1-based line number.
    pub fn ingest_jsonl<R: BufRead>(&mut self, reader: R) -> Result<LoadReport, CorpusError> {
        let mut report = LoadReport::default();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let outcome = serde_json::from_str::<AbstractRecord>(&line)
                .map_err(|e| e.to_string())
                .and_then(|rec| self.ingest(rec).map(|_| ()).map_err(|e| e.to_string()));
            match outcome {
                Ok(()) => report.stats.ingested += 1,
                Err(message) => {
                    report.stats.skipped += 1;
                    report
                        .errors
                        .push(CorpusError::Malformed { line: n + 1, message });
                }
            }
        }
        Ok(report)
    }

    pub fn from_jsonl<R: BufRead>(reader: R) -> Result<(Self, LoadReport), CorpusError> {
        let mut corpus = Self::new();
        let report = corpus.ingest_jsonl(reader)?;
        Ok((corpus, report))
    }

    pub fn load(path: &std::path::Path) -> Result<(Self, LoadReport), CorpusError> {
        let file = std::fs::File::open(path)?;
        Self::from_jsonl(std::io::BufReader::new(file))
    }
}

fn expression_terms(expr: &str) -> Vec<String> {
    let mut seen = HashSet::new();
    terms(expr).filter(|t| seen.insert(t.clone())).collect()
}

/// Documents mentioning at least one agent term and one disease term,
/// ranked by the summed frequency of all claim terms, then by id.
pub fn retrieve_candidates<'c>(
    corpus: &'c Corpus,
    q: &ClaimQuery,
    limit: usize,
) -> Vec<&'c Document> {
    let agent = expression_terms(q.agent());
    let disease = expression_terms(q.disease());

    let gather = |terms: &[String]| -> HashMap<usize, u32> {
        let mut hits: HashMap<usize, u32> = HashMap::new();
        for term in terms {
            for p in corpus.term_index.get(term).into_iter().flatten() {
                *hits.entry(p.doc).or_default() += p.term_frequency;
            }
        }
        hits
    };
    let agent_hits = gather(&agent);
    let disease_only: Vec<String> = disease
        .iter()
        .filter(|t| !agent.contains(t))
        .cloned()
        .collect();
    let disease_hits = gather(&disease);
    let disease_extra = gather(&disease_only);

    let mut ranked: Vec<(u32, &Document)> = agent_hits
        .iter()
        .filter(|(doc, _)| disease_hits.contains_key(doc))
        .map(|(&doc, &tf)| {
            let extra = disease_extra.get(&doc).copied().unwrap_or(0);
            (tf + extra, &corpus.documents[doc])
        })
        .collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.id.cmp(&b.1.id)));
    ranked.truncate(limit);
    ranked.into_iter().map(|(_, d)| d).collect()
}
