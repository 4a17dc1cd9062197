//! Offline evaluation of the extractive and boolean stages.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::classification::classification_scores;
use super::datasets::{BoolExample, EqaExample};
use super::rouge::{rouge_l, rouge_n};
use super::span::{best_overlap, exact_match};
use super::MetricsError;
use crate::corpus::{AbstractRecord, Document};
use crate::pipeline::{merge_highlights, Fixed6};
use crate::scorers::{BqaClassifier, EqaScorer, StanceLabel};
use crate::tokenizer2d::{make_windows, remap_to_document, WindowConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalTask {
    Eqa,
    Bqa,
}

/// Scores of one example. Fields that do not apply to the task are `None`;
/// ROUGE is also `None` for unanswerable extractive examples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExampleScores {
    pub id: String,
    pub prediction: String,
    pub gold_label: Option<StanceLabel>,
    pub predicted_label: Option<StanceLabel>,
    pub em: Option<f64>,
    pub f1: Option<f64>,
    pub recall: Option<f64>,
    pub rouge1: Option<f64>,
    pub rouge2: Option<f64>,
    pub rouge_l: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Aggregates {
    pub em: Option<f64>,
    pub f1: Option<f64>,
    pub recall: Option<f64>,
    pub rouge1: Option<f64>,
    pub rouge2: Option<f64>,
    pub rouge_l: Option<f64>,
    pub accuracy: Option<f64>,
    pub macro_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub task: EvalTask,
    pub aggregates: Aggregates,
    pub per_example: Vec<ExampleScores>,
}

#[derive(Serialize)]
struct WireReport {
    task: EvalTask,
    examples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    em: Option<Fixed6>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f1: Option<Fixed6>,
    #[serde(skip_serializing_if = "Option::is_none")]
    recall: Option<Fixed6>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rouge1: Option<Fixed6>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rouge2: Option<Fixed6>,
    #[serde(rename = "rougeL", skip_serializing_if = "Option::is_none")]
    rouge_l: Option<Fixed6>,
    #[serde(skip_serializing_if = "Option::is_none")]
    accuracy: Option<Fixed6>,
    #[serde(skip_serializing_if = "Option::is_none")]
    macro_f1: Option<Fixed6>,
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

fn tsv_safe(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

impl MetricReport {
    pub fn examples(&self) -> usize {
        self.per_example.len()
    }

    /// Aggregates as pretty JSON with six-decimal numbers.
    pub fn to_json(&self) -> String {
        let a = &self.aggregates;
        let f = |v: Option<f64>| v.map(Fixed6);
        let wire = WireReport {
            task: self.task,
            examples: self.examples(),
            em: f(a.em),
            f1: f(a.f1),
            recall: f(a.recall),
            rouge1: f(a.rouge1),
            rouge2: f(a.rouge2),
            rouge_l: f(a.rouge_l),
            accuracy: f(a.accuracy),
            macro_f1: f(a.macro_f1),
        };
        serde_json::to_string_pretty(&wire).expect("scores are finite")
    }

    /// One line per example after a header; missing scores are `-`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        match self.task {
            EvalTask::Eqa => {
                out.push_str("id\tem\tf1\trecall\trouge1\trouge2\trougeL\tprediction\n");
                for e in &self.per_example {
                    let _ = writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        tsv_safe(&e.id),
                        cell(e.em),
                        cell(e.f1),
                        cell(e.recall),
                        cell(e.rouge1),
                        cell(e.rouge2),
                        cell(e.rouge_l),
                        tsv_safe(&e.prediction)
                    );
                }
            }
            EvalTask::Bqa => {
                out.push_str("id\tgold\tpred\tcorrect\n");
                for e in &self.per_example {
                    let label = |l: Option<StanceLabel>| l.map_or("-", StanceLabel::as_str);
                    let _ = writeln!(
                        out,
                        "{}\t{}\t{}\t{}",
                        tsv_safe(&e.id),
                        label(e.gold_label),
                        label(e.predicted_label),
                        u8::from(e.gold_label == e.predicted_label)
                    );
                }
            }
        }
        out
    }
}

fn mean<I: Iterator<Item = Option<f64>>>(values: I) -> Option<f64> {
    let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn max_over<F: Fn(&str) -> f64>(golds: &[String], f: F) -> Option<f64> {
    golds.iter().map(|g| f(g)).reduce(f64::max)
}

/// Predicted answer for one example: every window's span mapped back onto
/// the context and merged.
pub fn predict_eqa(example: &EqaExample, cfg: &WindowConfig, eqa: &dyn EqaScorer) -> Result<String, MetricsError> {
    let wrap = |e: &dyn std::fmt::Display| MetricsError::Example {
        id: example.id.clone(),
        message: e.to_string(),
    };
    let doc = Document::from_record(AbstractRecord {
        id: example.id.clone(),
        abstract_text: example.context.clone(),
        title: None,
        url: None,
        year: None,
    })
    .map_err(|e| wrap(&e))?;
    let mut highlights = Vec::new();
    for w in make_windows(&doc, cfg).map_err(|e| wrap(&e))? {
        let answer = eqa.score(&example.question, &w).map_err(|e| wrap(&e))?;
        highlights.extend(remap_to_document(&doc, &w, &answer).map_err(|e| wrap(&e))?);
    }
    Ok(merge_highlights(&doc.id, highlights).map_err(|e| wrap(&e))?.text)
}

pub fn score_eqa_prediction(id: &str, prediction: String, golds: &[String]) -> ExampleScores {
    let overlap = best_overlap(&prediction, golds);
    ExampleScores {
        id: id.to_string(),
        em: Some(exact_match(&prediction, golds)),
        f1: Some(overlap.f1),
        recall: Some(overlap.recall),
        rouge1: max_over(golds, |g| rouge_n(&prediction, g, 1)),
        rouge2: max_over(golds, |g| rouge_n(&prediction, g, 2)),
        rouge_l: max_over(golds, |g| rouge_l(&prediction, g)),
        prediction,
        ..Default::default()
    }
}

pub fn aggregate_eqa(per_example: Vec<ExampleScores>) -> MetricReport {
    let col = |f: fn(&ExampleScores) -> Option<f64>| mean(per_example.iter().map(f));
    let aggregates = Aggregates {
        em: col(|e| e.em),
        f1: col(|e| e.f1),
        recall: col(|e| e.recall),
        rouge1: col(|e| e.rouge1),
        rouge2: col(|e| e.rouge2),
        rouge_l: col(|e| e.rouge_l),
        ..Default::default()
    };
    MetricReport {
        task: EvalTask::Eqa,
        aggregates,
        per_example,
    }
}

pub fn evaluate_eqa(
    dataset: &[EqaExample],
    cfg: &WindowConfig,
    eqa: &dyn EqaScorer,
) -> Result<MetricReport, MetricsError> {
    if dataset.is_empty() {
        return Err(MetricsError::NoExamples);
    }
    let per_example = dataset
        .par_iter()
        .map(|ex| {
            let prediction = predict_eqa(ex, cfg, eqa)?;
            Ok(score_eqa_prediction(&ex.id, prediction, &ex.gold_answers()))
        })
        .collect::<Result<Vec<_>, MetricsError>>()?;
    Ok(aggregate_eqa(per_example))
}

pub fn evaluate_bqa(dataset: &[BoolExample], bqa: &dyn BqaClassifier) -> Result<MetricReport, MetricsError> {
    let per_example = dataset
        .par_iter()
        .map(|ex| {
            let dist = bqa.classify(&ex.question, &ex.passage).map_err(|e| MetricsError::Example {
                id: ex.id.clone(),
                message: e.to_string(),
            })?;
            let pred = dist.label();
            Ok(ExampleScores {
                id: ex.id.clone(),
                prediction: pred.as_str().to_string(),
                gold_label: Some(ex.answer),
                predicted_label: Some(pred),
                ..Default::default()
            })
        })
        .collect::<Result<Vec<_>, MetricsError>>()?;
    let preds: Vec<_> = per_example.iter().filter_map(|e| e.predicted_label).collect();
    let golds: Vec<_> = per_example.iter().filter_map(|e| e.gold_label).collect();
    let scores = classification_scores(&preds, &golds)?;
    Ok(MetricReport {
        task: EvalTask::Bqa,
        aggregates: Aggregates {
            accuracy: Some(scores.accuracy),
            macro_f1: Some(scores.macro_f1),
            ..Default::default()
        },
        per_example,
    })
}
