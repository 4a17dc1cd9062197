//! Closed claim-questions of the form `Does <agent> <verb> <disease>?`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClaimError {
    #[error("no recognized verb (expected one of prevent, cure, cause, increase) in {0:?}")]
    NoVerbMatch(String),
    #[error("empty {0} slot")]
    EmptySlot(Slot),
    #[error("claim must start with \"Does\": {0:?}")]
    NotAQuestion(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Agent,
    Disease,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slot::Agent => "agent",
            Slot::Disease => "disease",
        })
    }
}

/// The four relations a claim can assert between an agent and a disease.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimVerb {
    Prevent,
    Cure,
    Cause,
    Increase,
}

impl ClaimVerb {
    pub const ALL: [ClaimVerb; 4] = [
        ClaimVerb::Prevent,
        ClaimVerb::Cure,
        ClaimVerb::Cause,
        ClaimVerb::Increase,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClaimVerb::Prevent => "prevent",
            ClaimVerb::Cure => "cure",
            ClaimVerb::Cause => "cause",
            ClaimVerb::Increase => "increase",
        }
    }
}

impl fmt::Display for ClaimVerb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimVerb {
    type Err = ClaimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_lowercase();
        ClaimVerb::ALL
            .into_iter()
            .find(|v| v.as_str() == lower)
            .ok_or_else(|| ClaimError::NoVerbMatch(s.to_string()))
    }
}

/// A parsed claim. Construct through [`ClaimQuery::new`] or [`parse_claim`]
/// so that `question_text` always matches the slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimQuery {
    agent: String,
    verb: ClaimVerb,
    disease: String,
    #[serde(rename = "question")]
    question_text: String,
}

impl ClaimQuery {
    pub fn new(agent: &str, verb: ClaimVerb, disease: &str) -> Result<Self, ClaimError> {
        let agent = collapse_ws(agent);
        let disease = collapse_ws(disease);
        if agent.is_empty() {
            return Err(ClaimError::EmptySlot(Slot::Agent));
        }
        if disease.is_empty() {
            return Err(ClaimError::EmptySlot(Slot::Disease));
        }
        let question_text = format!("Does {agent} {verb} {disease}?");
        Ok(Self {
            agent,
            verb,
            disease,
            question_text,
        })
    }

    pub fn agent(&self) -> &str {
        &self.agent
    }

    pub fn verb(&self) -> ClaimVerb {
        self.verb
    }

    pub fn disease(&self) -> &str {
        &self.disease
    }

    pub fn question_text(&self) -> &str {
        &self.question_text
    }
}

impl<'de> Deserialize<'de> for ClaimQuery {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            agent: String,
            verb: ClaimVerb,
            disease: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        ClaimQuery::new(&raw.agent, raw.verb, &raw.disease).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for ClaimQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.question_text)
    }
}

impl FromStr for ClaimQuery {
    type Err = ClaimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_claim(s)
    }
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses `Does <agent> <verb> <disease>?`, case-insensitively. The agent is
/// everything before the first verb word, the disease everything after it.
pub fn parse_claim(text: &str) -> Result<ClaimQuery, ClaimError> {
    let trimmed = text.trim();
    let body = trimmed.strip_suffix('?').unwrap_or(trimmed);
    let words: Vec<&str> = body.split_whitespace().collect();

    match words.first() {
        Some(first) if first.eq_ignore_ascii_case("does") => {}
        _ => return Err(ClaimError::NotAQuestion(text.to_string())),
    }

    let rest = &words[1..];
    let (pos, verb) = rest
        .iter()
        .enumerate()
        .find_map(|(i, w)| w.parse::<ClaimVerb>().ok().map(|v| (i, v)))
        .ok_or_else(|| ClaimError::NoVerbMatch(text.to_string()))?;

    ClaimQuery::new(&rest[..pos].join(" "), verb, &rest[pos + 1..].join(" "))
}

pub fn render_claim(q: &ClaimQuery) -> String {
    q.question_text.clone()
}
