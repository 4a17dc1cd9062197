//! Accuracy and macro-F1 over the three stance classes.

use serde::Serialize;

use super::MetricsError;
use crate::scorers::StanceLabel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationScores {
    pub accuracy: f64,
    pub macro_f1: f64,
    /// Indexed like [`StanceLabel::ALL`].
    pub per_class: [ClassScores; 3],
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Macro-F1 is the unweighted mean over yes, no and neutral. A class with
/// no predictions or no golds has an undefined precision or recall, which
/// counts as 0.
pub fn classification_scores(
    preds: &[StanceLabel],
    golds: &[StanceLabel],
) -> Result<ClassificationScores, MetricsError> {
    if preds.len() != golds.len() {
        return Err(MetricsError::LengthMismatch {
            preds: preds.len(),
            golds: golds.len(),
        });
    }
    if preds.is_empty() {
        return Err(MetricsError::NoExamples);
    }
    let correct = preds.iter().zip(golds).filter(|(p, g)| p == g).count();
    let per_class = StanceLabel::ALL.map(|class| {
        let tp = preds.iter().zip(golds).filter(|(p, g)| **p == class && **g == class).count();
        let predicted = preds.iter().filter(|p| **p == class).count();
        let actual = golds.iter().filter(|g| **g == class).count();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, actual);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassScores { precision, recall, f1 }
    });
    Ok(ClassificationScores {
        accuracy: ratio(correct, preds.len()),
        macro_f1: per_class.iter().map(|c| c.f1).sum::<f64>() / per_class.len() as f64,
        per_class,
    })
}
