//! Sequence similarity between candidate and reference token streams.
//!
//! Scores are sentence-level (one function pair at a time); corpus figures are
//! the arithmetic mean of per-pair scores.

mod bleu;
mod meteor;
mod rouge;

use serde::Serialize;

pub use bleu::bleu;
pub use meteor::{meteor, meteor_alignment, MeteorAlignment};
pub use rouge::{lcs_length, rouge_l};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("candidate or reference sequence is empty")]
    EmptyInput,
    #[error("n-gram order must be at least 1")]
    InvalidOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    Bleu,
    RougeL,
    Meteor,
}

/// A score in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricScore {
    pub name: MetricName,
    pub value: f64,
}

impl MetricScore {
    pub(crate) fn new(name: MetricName, value: f64) -> Self {
        MetricScore {
            name,
            value: value.clamp(0.0, 1.0),
        }
    }
}

/// All three sequence metrics for one candidate/reference pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequenceScores {
    pub bleu: f64,
    pub rouge_l: f64,
    pub meteor: f64,
}

pub fn score_all<T: Eq + std::hash::Hash>(
    candidate: &[T],
    reference: &[T],
) -> Result<SequenceScores, MetricError> {
    Ok(SequenceScores {
        bleu: bleu(candidate, reference, 4)?.value,
        rouge_l: rouge_l(candidate, reference)?.value,
        meteor: meteor(candidate, reference)?.value,
    })
}

/// Arithmetic mean of per-pair scores, summed in iteration order.
/// Returns `None` for an empty corpus.
pub fn corpus_mean<'a>(scores: impl IntoIterator<Item = &'a SequenceScores>) -> Option<SequenceScores> {
    let mut n = 0usize;
    let mut acc = SequenceScores {
        bleu: 0.0,
        rouge_l: 0.0,
        meteor: 0.0,
    };
    for s in scores {
        n += 1;
        acc.bleu += s.bleu;
        acc.rouge_l += s.rouge_l;
        acc.meteor += s.meteor;
    }
    (n > 0).then(|| SequenceScores {
        bleu: acc.bleu / n as f64,
        rouge_l: acc.rouge_l / n as f64,
        meteor: acc.meteor / n as f64,
    })
}
