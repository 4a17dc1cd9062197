//! Stable JSON rendering of consensus reports.
//!
//! Keys come out in declaration order and every real number is written with
//! exactly six decimals, so identical reports always serialize to identical
//! bytes.

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use super::{ArticleVerdict, ConsensusReport, Highlight};
use crate::claims::ClaimQuery;
use crate::scorers::{BooleanDistribution, StanceLabel};

use super::consensus::{Consensus, VoteCounts};

/// A float serialized with six fixed decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed6(pub f64);

impl Serialize for Fixed6 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom(format!("cannot serialize {}", self.0)));
        }
        // -0.0 would otherwise print as "-0.000000".
        let v = if self.0 == 0.0 { 0.0 } else { self.0 };
        RawValue::from_string(format!("{v:.6}"))
            .map_err(S::Error::custom)?
            .serialize(serializer)
    }
}

#[derive(Serialize)]
struct WireReport<'a> {
    claim: &'a ClaimQuery,
    label: Consensus,
    counts: &'a VoteCounts,
    articles: Vec<WireArticle<'a>>,
}

#[derive(Serialize)]
struct WireDistribution {
    yes: Fixed6,
    no: Fixed6,
    neutral: Fixed6,
}

impl From<&BooleanDistribution> for WireDistribution {
    fn from(d: &BooleanDistribution) -> Self {
        Self {
            yes: Fixed6(d.yes()),
            no: Fixed6(d.no()),
            neutral: Fixed6(d.neutral()),
        }
    }
}

#[derive(Serialize)]
struct WireHighlight<'a> {
    start: usize,
    end: usize,
    text: &'a str,
    score: Fixed6,
}

impl<'a> From<&'a Highlight> for WireHighlight<'a> {
    fn from(h: &'a Highlight) -> Self {
        Self {
            start: h.char_start,
            end: h.char_end,
            text: &h.text,
            score: Fixed6(h.score),
        }
    }
}

#[derive(Serialize)]
struct WireArticle<'a> {
    doc_id: &'a str,
    label: StanceLabel,
    distribution: WireDistribution,
    highlights: Vec<WireHighlight<'a>>,
}

impl<'a> From<&'a ArticleVerdict> for WireArticle<'a> {
    fn from(v: &'a ArticleVerdict) -> Self {
        Self {
            doc_id: &v.doc_id,
            label: v.label,
            distribution: (&v.distribution).into(),
            highlights: v.evidence.highlights.iter().map(Into::into).collect(),
        }
    }
}

impl Serialize for ConsensusReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        WireReport {
            claim: &self.claim,
            label: self.label,
            counts: &self.counts,
            articles: self.articles.iter().map(Into::into).collect(),
        }
        .serialize(serializer)
    }
}

impl ConsensusReport {
    /// Pretty-printed JSON, byte-stable across runs.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite")
    }
}
