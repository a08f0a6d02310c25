use super::{MetricError, MetricName, MetricScore};

/// Length of the longest common subsequence, two-row dynamic program.
pub fn lcs_length<T: Eq>(a: &[T], b: &[T]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; short.len() + 1];
    let mut cur = vec![0usize; short.len() + 1];
    for x in long {
        for (j, y) in short.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// ROUGE-L balanced F-measure over the LCS.
pub fn rouge_l<T: Eq>(candidate: &[T], reference: &[T]) -> Result<MetricScore, MetricError> {
    if candidate.is_empty() || reference.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let lcs = lcs_length(candidate, reference);
    if lcs == 0 {
        return Ok(MetricScore::new(MetricName::RougeL, 0.0));
    }
    let p = lcs as f64 / candidate.len() as f64;
    let r = lcs as f64 / reference.len() as f64;
    Ok(MetricScore::new(MetricName::RougeL, 2.0 * p * r / (p + r)))
}
