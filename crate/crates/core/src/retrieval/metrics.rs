use std::collections::HashMap;

use super::{QueryRecord, RetrievalError, RetrievalResult};

fn index_results(results: &[RetrievalResult]) -> HashMap<&str, &RetrievalResult> {
    results.iter().map(|r| (r.query_id.as_str(), r)).collect()
}

fn lookup<'a>(
    by_id: &HashMap<&str, &'a RetrievalResult>,
    q: &QueryRecord,
) -> Result<&'a RetrievalResult, RetrievalError> {
    by_id
        .get(q.id.as_str())
        .copied()
        .ok_or_else(|| RetrievalError::MissingResult(q.id.clone()))
}

/// `(1/q) Σ_i |relevant_i ∩ top_k_i| / min(|relevant_i|, k)`.
///
/// Rankings longer than `k` are cut to their first `k` ids.
pub fn recall_at_k(
    results: &[RetrievalResult],
    judgments: &[QueryRecord],
    k: usize,
) -> Result<f64, RetrievalError> {
    if k == 0 {
        return Err(RetrievalError::InvalidK);
    }
    if judgments.is_empty() {
        return Err(RetrievalError::NoQueries);
    }
    let by_id = index_results(results);
    let mut sum = 0.0;
    for q in judgments {
        q.validate()?;
        let r = lookup(&by_id, q)?;
        let hits = r
            .ranked_ids
            .iter()
            .take(k)
            .filter(|id| q.relevant_ids.contains(*id))
            .count();
        sum += hits as f64 / q.relevant_ids.len().min(k) as f64;
    }
    Ok(sum / judgments.len() as f64)
}

/// `(1/|relevant|) Σ_k P@k · rel@k` over the whole ranking. Relevant ids
/// missing from the ranking contribute zero.
pub fn average_precision(ranked_ids: &[String], q: &QueryRecord) -> f64 {
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (pos, id) in ranked_ids.iter().enumerate() {
        if q.relevant_ids.contains(id) {
            hits += 1;
            sum += hits as f64 / (pos + 1) as f64;
        }
    }
    sum / q.relevant_ids.len() as f64
}

/// Mean of per-query average precision.
pub fn mean_ap(results: &[RetrievalResult], judgments: &[QueryRecord]) -> Result<f64, RetrievalError> {
    if judgments.is_empty() {
        return Err(RetrievalError::NoQueries);
    }
    let by_id = index_results(results);
    let mut sum = 0.0;
    for q in judgments {
        q.validate()?;
        sum += average_precision(&lookup(&by_id, q)?.ranked_ids, q);
    }
    Ok(sum / judgments.len() as f64)
}
