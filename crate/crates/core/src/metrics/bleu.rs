use std::collections::HashMap;
use std::hash::Hash;

use super::{MetricError, MetricName, MetricScore};

/// Sentence-level BLEU with uniform weights over orders `1..=max_n`.
///
/// Higher-order precisions with no matching n-gram are add-one smoothed to
/// `1 / (count + 1)`. With no unigram overlap the score is 0. The brevity
/// penalty is `exp(min(0, 1 - |ref| / |cand|))`.
pub fn bleu<T: Eq + Hash>(
    candidate: &[T],
    reference: &[T],
    max_n: usize,
) -> Result<MetricScore, MetricError> {
    if max_n == 0 {
        return Err(MetricError::InvalidOrder);
    }
    if candidate.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptyInput);
    }

    let mut log_sum = 0.0;
    for n in 1..=max_n {
        let (matches, total) = clipped_matches(candidate, reference, n);
        let precision = if matches > 0 {
            matches as f64 / total as f64
        } else if n == 1 {
            return Ok(MetricScore::new(MetricName::Bleu, 0.0));
        } else {
            1.0 / (total as f64 + 1.0)
        };
        log_sum += precision.ln();
    }
    let c = candidate.len() as f64;
    let r = reference.len() as f64;
    let brevity = (1.0 - r / c).min(0.0).exp();
    Ok(MetricScore::new(
        MetricName::Bleu,
        brevity * (log_sum / max_n as f64).exp(),
    ))
}

/// (clipped matching n-grams, candidate n-gram count)
fn clipped_matches<T: Eq + Hash>(candidate: &[T], reference: &[T], n: usize) -> (usize, usize) {
    if candidate.len() < n {
        return (0, 0);
    }
    let mut ref_counts: HashMap<&[T], usize> = HashMap::new();
    if reference.len() >= n {
        for g in reference.windows(n) {
            *ref_counts.entry(g).or_default() += 1;
        }
    }
    let mut cand_counts: HashMap<&[T], usize> = HashMap::new();
    for g in candidate.windows(n) {
        *cand_counts.entry(g).or_default() += 1;
    }
    let matches = cand_counts
        .iter()
        .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
        .sum();
    (matches, candidate.len() + 1 - n)
}
