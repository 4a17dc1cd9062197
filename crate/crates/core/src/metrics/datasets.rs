//! Loaders for SQuAD v2 style extractive datasets and BoolQ style JSONL.

use std::io::BufRead;

use serde::Deserialize;

use super::MetricsError;
use crate::scorers::StanceLabel;

/// A reference answer with its byte offset in the context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldAnswer {
    pub text: String,
    pub start: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqaExample {
    pub id: String,
    pub question: String,
    pub context: String,
    pub answers: Vec<GoldAnswer>,
    pub is_impossible: bool,
}

impl EqaExample {
    pub fn gold_answers(&self) -> Vec<String> {
        self.answers.iter().map(|a| a.text.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoolExample {
    pub id: String,
    pub question: String,
    pub passage: String,
    pub answer: StanceLabel,
}

#[derive(Deserialize)]
struct SquadFile {
    data: Vec<SquadArticle>,
}

#[derive(Deserialize)]
struct SquadArticle {
    paragraphs: Vec<SquadParagraph>,
}

#[derive(Deserialize)]
struct SquadParagraph {
    context: String,
    qas: Vec<SquadQa>,
}

#[derive(Deserialize)]
struct SquadQa {
    id: String,
    question: String,
    #[serde(default)]
    answers: Vec<SquadAnswer>,
    is_impossible: Option<bool>,
}

#[derive(Deserialize)]
struct SquadAnswer {
    text: String,
    answer_start: usize,
}

fn dataset_error(id: &str, message: impl Into<String>) -> MetricsError {
    MetricsError::Dataset {
        id: id.to_string(),
        message: message.into(),
    }
}

/// Reads the `data → paragraphs → qas` layout. Answer offsets are character
/// offsets in the file and are converted to byte offsets here. A missing
/// `is_impossible` flag is inferred from the answer list.
pub fn load_squad(json: &str) -> Result<Vec<EqaExample>, MetricsError> {
    let file: SquadFile = serde_json::from_str(json).map_err(|e| dataset_error("<file>", e.to_string()))?;
    let mut out = Vec::new();
    for paragraph in file.data.into_iter().flat_map(|a| a.paragraphs) {
        for qa in paragraph.qas {
            let is_impossible = qa.is_impossible.unwrap_or(qa.answers.is_empty());
            if is_impossible != qa.answers.is_empty() {
                return Err(dataset_error(
                    &qa.id,
                    format!(
                        "is_impossible is {is_impossible} but {} answers are listed",
                        qa.answers.len()
                    ),
                ));
            }
            let mut answers = Vec::with_capacity(qa.answers.len());
            for a in qa.answers {
                let start = paragraph
                    .context
                    .char_indices()
                    .map(|(b, _)| b)
                    .chain(std::iter::once(paragraph.context.len()))
                    .nth(a.answer_start)
                    .filter(|&b| paragraph.context[b..].starts_with(&a.text))
                    .ok_or_else(|| {
                        dataset_error(
                            &qa.id,
                            format!("answer {:?} not found at offset {}", a.text, a.answer_start),
                        )
                    })?;
                answers.push(GoldAnswer { text: a.text, start });
            }
            out.push(EqaExample {
                id: qa.id,
                question: qa.question,
                context: paragraph.context.clone(),
                answers,
                is_impossible,
            });
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawAnswer {
    Bool(bool),
    Text(String),
}

#[derive(Deserialize)]
struct RawBool {
    id: Option<String>,
    question: String,
    passage: String,
    answer: RawAnswer,
}

/// One JSON object per line; blank lines are skipped. `answer` may be
/// yes/no/neutral, maybe (read as neutral) or a JSON boolean.
pub fn load_boolq<R: BufRead>(reader: R) -> Result<Vec<BoolExample>, MetricsError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fallback_id = format!("line {}", i + 1);
        let raw: RawBool = serde_json::from_str(&line).map_err(|e| dataset_error(&fallback_id, e.to_string()))?;
        let id = raw.id.unwrap_or(fallback_id);
        let answer = match raw.answer {
            RawAnswer::Bool(true) => StanceLabel::Yes,
            RawAnswer::Bool(false) => StanceLabel::No,
            RawAnswer::Text(s) => s.parse().map_err(|e: String| dataset_error(&id, e))?,
        };
        out.push(BoolExample {
            id,
            question: raw.question,
            passage: raw.passage,
            answer,
        });
    }
    Ok(out)
}
