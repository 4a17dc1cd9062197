//! Seeded synthetic abstracts for load tests and property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::corpus::AbstractRecord;
use crate::scorers::{DEFAULT_NEGATIVE_CUES, DEFAULT_POSITIVE_CUES};

const FILLER: &[&str] = &[
    "patients", "cohort", "outcome", "baseline", "measured", "treatment", "group", "observed", "trial", "data",
    "analysis", "response", "clinical", "study", "sample", "rate", "follow-up", "hospital", "adults", "cases",
    "interval", "primary", "secondary", "dose", "endpoint", "month", "week", "participants", "randomized",
    "control",
];

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    chars
        .next()
        .map(|c| c.to_uppercase().chain(chars).collect())
        .unwrap_or_default()
}

fn cue_lines(source: &str) -> Vec<&str> {
    source
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

/// A sentence of `words` filler words, capitalized and ending in a period.
pub fn filler_sentence<R: Rng>(rng: &mut R, words: usize) -> String {
    let body: Vec<&str> = (0..words.max(1)).map(|_| *FILLER.choose(rng).expect("non-empty")).collect();
    format!("{}.", capitalize(&body.join(" ")))
}

/// An abstract of exactly `sentences` sentences of filler text.
pub fn filler_abstract<R: Rng>(rng: &mut R, sentences: usize, words: std::ops::RangeInclusive<usize>) -> String {
    (0..sentences)
        .map(|_| {
            let n = rng.gen_range(words.clone());
            filler_sentence(rng, n)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// `n` abstracts of 3 to 14 sentences. Roughly half mention both `agent`
/// and `disease`, and those mention a positive or negative cue with equal
/// odds, so every stance path of the pipeline is exercised.
pub fn synthetic_corpus<R: Rng>(rng: &mut R, n: usize, agent: &str, disease: &str) -> Vec<AbstractRecord> {
    let negative = cue_lines(DEFAULT_NEGATIVE_CUES);
    let positive = cue_lines(DEFAULT_POSITIVE_CUES);
    (0..n)
        .map(|i| {
            let count = rng.gen_range(3..=14);
            let mut sentences: Vec<String> = (0..count)
                .map(|_| {
                    let w = rng.gen_range(6..=24);
                    filler_sentence(rng, w)
                })
                .collect();
            if rng.gen_bool(0.5) {
                let cue = if rng.gen_bool(0.5) {
                    negative.choose(rng)
                } else {
                    positive.choose(rng)
                }
                .expect("lexicons are non-empty");
                let at = rng.gen_range(0..count);
                sentences[at] = format!("{} {cue} {disease} in these {}.", capitalize(agent), FILLER.choose(rng).unwrap());
            }
            AbstractRecord {
                id: format!("syn-{i:05}"),
                abstract_text: sentences.join(" "),
                title: Some(format!("Synthetic abstract {i}")),
                url: None,
                year: Some(2000 + (i % 25) as i32),
            }
        })
        .collect()
}
