//! Cue-phrase boolean baseline.

use std::collections::HashSet;
use std::path::Path;

use super::{BooleanDistribution, BqaClassifier, ScorerError};

/// Probability mass always left on "neutral" when any cue fires.
pub const NEUTRAL_FLOOR: f64 = 0.05;

/// Words looked at before a positive cue when checking for negation.
pub const NEGATION_WINDOW: usize = 3;

pub const DEFAULT_NEGATIVE_CUES: &str = include_str!("../../data/cues/negative.txt");
pub const DEFAULT_POSITIVE_CUES: &str = include_str!("../../data/cues/positive.txt");
pub const DEFAULT_NEGATORS: &str = include_str!("../../data/cues/negators.txt");

fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '-' || c == '\''))
        .map(|w| w.trim_matches(|c| c == '-' || c == '\'').to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

fn parse_lines(src: &str) -> impl Iterator<Item = &str> {
    src.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CueLexicon {
    negative: Vec<Vec<String>>,
    positive: Vec<Vec<String>>,
    negators: HashSet<String>,
}

impl CueLexicon {
    /// Builds a lexicon from the plain-text format: one phrase per line,
    /// blank lines and `#` comments ignored.
    pub fn parse(negative: &str, positive: &str, negators: &str) -> Self {
        let phrases = |src| {
            parse_lines(src)
                .map(words)
                .filter(|w| !w.is_empty())
                .collect()
        };
        Self {
            negative: phrases(negative),
            positive: phrases(positive),
            negators: parse_lines(negators).flat_map(words).collect(),
        }
    }

    /// Reads `negative.txt`, `positive.txt` and `negators.txt` from `dir`.
    pub fn from_dir(dir: &Path) -> std::io::Result<Self> {
        let read = |name| std::fs::read_to_string(dir.join(name));
        Ok(Self::parse(
            &read("negative.txt")?,
            &read("positive.txt")?,
            &read("negators.txt")?,
        ))
    }

    /// Counts `(negative, positive)` cue occurrences in `context`.
    pub fn count(&self, context: &str) -> (usize, usize) {
        let tokens = words(context);
        let occurrences = |cue: &Vec<String>| -> Vec<usize> {
            if cue.len() > tokens.len() {
                return Vec::new();
            }
            (0..=tokens.len() - cue.len())
                .filter(|&i| tokens[i..i + cue.len()] == cue[..])
                .collect()
        };
        let negative = self.negative.iter().map(|c| occurrences(c).len()).sum();
        let positive = self
            .positive
            .iter()
            .flat_map(occurrences)
            .filter(|&i| {
                let from = i.saturating_sub(NEGATION_WINDOW);
                !tokens[from..i].iter().any(|w| self.negators.contains(w))
            })
            .count();
        (negative, positive)
    }

    pub fn classify(&self, context: &str) -> BooleanDistribution {
        let (negative, positive) = self.count(context);
        let total = negative + positive;
        if total == 0 {
            return BooleanDistribution::NEUTRAL;
        }
        let mass = 1.0 - NEUTRAL_FLOOR;
        let yes = positive as f64 / total as f64 * mass;
        let no = mass - yes;
        BooleanDistribution::new(yes, no, NEUTRAL_FLOOR).expect("cue counts form a distribution")
    }
}

impl Default for CueLexicon {
    fn default() -> Self {
        Self::parse(DEFAULT_NEGATIVE_CUES, DEFAULT_POSITIVE_CUES, DEFAULT_NEGATORS)
    }
}

/// Classifies with the built-in lexicon. The question is not consulted.
pub fn rule_bqa_classify(_question: &str, context: &str) -> BooleanDistribution {
    static LEXICON: std::sync::OnceLock<CueLexicon> = std::sync::OnceLock::new();
    LEXICON.get_or_init(CueLexicon::default).classify(context)
}

#[derive(Debug, Clone, Default)]
pub struct RuleBqa {
    lexicon: CueLexicon,
}

impl RuleBqa {
    pub fn new(lexicon: CueLexicon) -> Self {
        Self { lexicon }
    }
}

impl BqaClassifier for RuleBqa {
    fn classify(&self, _question: &str, context: &str) -> Result<BooleanDistribution, ScorerError> {
        Ok(self.lexicon.classify(context))
    }
}
