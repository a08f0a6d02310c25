use std::collections::HashMap;
use std::hash::Hash;

use super::{MetricError, MetricName, MetricScore};

/// Exact-match unigram alignment between candidate and reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeteorAlignment {
    /// Reference position aligned to each candidate position.
    pub pairs: Vec<Option<usize>>,
    pub matches: usize,
    pub chunks: usize,
}

/// Greedy left-to-right alignment: each candidate token continues the current
/// chunk when the next reference position matches, otherwise takes the
/// leftmost unused occurrence in the reference.
pub fn meteor_alignment<T: Eq + Hash>(candidate: &[T], reference: &[T]) -> MeteorAlignment {
    let mut occurrences: HashMap<&T, Vec<usize>> = HashMap::new();
    for (j, t) in reference.iter().enumerate() {
        occurrences.entry(t).or_default().push(j);
    }
    let mut used = vec![false; reference.len()];
    let mut pairs = vec![None; candidate.len()];
    let mut prev: Option<usize> = None;
    for (i, tok) in candidate.iter().enumerate() {
        let continued = prev
            .map(|p| p + 1)
            .filter(|&j| j < reference.len() && !used[j] && reference[j] == *tok);
        let chosen = continued.or_else(|| {
            occurrences
                .get(tok)
                .and_then(|occ| occ.iter().copied().find(|&j| !used[j]))
        });
        if let Some(j) = chosen {
            used[j] = true;
        }
        pairs[i] = chosen;
        prev = chosen;
    }

    let mut matches = 0;
    let mut chunks = 0;
    for (i, p) in pairs.iter().enumerate() {
        let Some(j) = *p else { continue };
        matches += 1;
        let extends = i > 0 && pairs[i - 1].is_some_and(|pj| pj + 1 == j);
        if !extends {
            chunks += 1;
        }
    }
    MeteorAlignment {
        pairs,
        matches,
        chunks,
    }
}

/// METEOR with the exact-match module only:
/// `Fmean = 10PR / (R + 9P)`, `penalty = 0.5 (chunks / m)^3`,
/// score `Fmean (1 - penalty)`.
pub fn meteor<T: Eq + Hash>(candidate: &[T], reference: &[T]) -> Result<MetricScore, MetricError> {
    if candidate.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let a = meteor_alignment(candidate, reference);
    if a.matches == 0 {
        return Ok(MetricScore::new(MetricName::Meteor, 0.0));
    }
    let m = a.matches as f64;
    let p = m / candidate.len() as f64;
    let r = m / reference.len() as f64;
    let fmean = 10.0 * p * r / (r + 9.0 * p);
    let penalty = 0.5 * (a.chunks as f64 / m).powi(3);
    Ok(MetricScore::new(MetricName::Meteor, fmean * (1.0 - penalty)))
}
