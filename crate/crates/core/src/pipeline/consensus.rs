use std::fmt;

use serde::{Deserialize, Serialize};

use super::ArticleVerdict;
use crate::claims::ClaimQuery;
use crate::scorers::StanceLabel;

pub const DEFAULT_BALANCED_MARGIN: f64 = 0.2;

/// Corpus-level outcome of the article vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Consensus {
    /// Yes votes dominate.
    Affirmative,
    /// No votes dominate.
    Negative,
    /// Yes and no are within the balanced margin of each other.
    Balanced,
    /// No article took a side.
    Neutral,
}

impl Consensus {
    pub fn as_str(self) -> &'static str {
        match self {
            Consensus::Affirmative => "affirmative",
            Consensus::Negative => "negative",
            Consensus::Balanced => "balanced",
            Consensus::Neutral => "neutral",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Consensus::Affirmative => "the selected articles mostly answer yes",
            Consensus::Negative => "the selected articles mostly answer no",
            Consensus::Balanced => "scientific opinion is divided on this claim",
            Consensus::Neutral => "the selected articles do not allow to answer the question",
        }
    }
}

impl fmt::Display for Consensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteCounts {
    pub yes: usize,
    pub no: usize,
    pub neutral: usize,
}

impl VoteCounts {
    pub fn tally<I: IntoIterator<Item = StanceLabel>>(labels: I) -> Self {
        labels.into_iter().fold(Self::default(), |mut c, l| {
            match l {
                StanceLabel::Yes => c.yes += 1,
                StanceLabel::No => c.no += 1,
                StanceLabel::Neutral => c.neutral += 1,
            }
            c
        })
    }

    /// Majority vote over yes/no; neutral articles abstain.
    pub fn consensus(&self, balanced_margin: f64) -> Consensus {
        let decided = self.yes + self.no;
        if decided == 0 {
            return Consensus::Neutral;
        }
        let gap = self.yes.abs_diff(self.no) as f64 / decided as f64;
        if gap <= balanced_margin {
            Consensus::Balanced
        } else if self.yes > self.no {
            Consensus::Affirmative
        } else {
            Consensus::Negative
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusReport {
    pub claim: ClaimQuery,
    pub counts: VoteCounts,
    pub label: Consensus,
    pub articles: Vec<ArticleVerdict>,
}

pub fn aggregate(claim: ClaimQuery, verdicts: Vec<ArticleVerdict>, balanced_margin: f64) -> ConsensusReport {
    let counts = VoteCounts::tally(verdicts.iter().map(|v| v.label));
    ConsensusReport {
        claim,
        label: counts.consensus(balanced_margin),
        counts,
        articles: verdicts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use StanceLabel::*;

    fn label(votes: &[StanceLabel]) -> Consensus {
        VoteCounts::tally(votes.iter().copied()).consensus(DEFAULT_BALANCED_MARGIN)
    }

    #[test]
    fn two_to_one_is_affirmative() {
        // |2 - 1| / 3 = 0.33 > 0.2
        assert_eq!(label(&[Yes, Yes, No]), Consensus::Affirmative);
        assert_eq!(label(&[No, No, Yes]), Consensus::Negative);
    }

    #[test]
    fn tie_is_balanced() {
        assert_eq!(label(&[Yes, No]), Consensus::Balanced);
    }

    #[test]
    fn neutral_only_or_empty() {
        assert_eq!(label(&[Neutral, Neutral]), Consensus::Neutral);
        assert_eq!(label(&[]), Consensus::Neutral);
    }

    #[test]
    fn margin_boundary_is_inclusive() {
        // 6 yes vs 4 no: gap 0.2 exactly.
        let c = VoteCounts { yes: 6, no: 4, neutral: 0 };
        assert_eq!(c.consensus(0.2), Consensus::Balanced);
        assert_eq!(c.consensus(0.19), Consensus::Affirmative);
        assert_eq!(c.consensus(0.0), Consensus::Affirmative);
    }
}
