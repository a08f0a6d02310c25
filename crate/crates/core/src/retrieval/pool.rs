use std::collections::{BTreeSet, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{QueryRecord, RetrievalError};

/// Candidate pool: every relevant id of every query plus distractors drawn
/// uniformly (ChaCha8 seeded with `seed`) from the rest of the corpus.
/// The result keeps corpus order.
pub fn build_pool(
    corpus: &[String],
    judgments: &[QueryRecord],
    pool_size: usize,
    seed: u64,
) -> Result<Vec<String>, RetrievalError> {
    let mut seen = HashSet::with_capacity(corpus.len());
    for id in corpus {
        if !seen.insert(id.as_str()) {
            return Err(RetrievalError::DuplicateId(id.clone()));
        }
    }
    let relevant: BTreeSet<&str> = judgments
        .iter()
        .flat_map(|q| q.relevant_ids.iter().map(String::as_str))
        .collect();
    if let Some(missing) = relevant.iter().find(|id| !seen.contains(*id)) {
        return Err(RetrievalError::UnknownRelevantId(missing.to_string()));
    }
    if pool_size < relevant.len() {
        return Err(RetrievalError::PoolTooSmall {
            pool_size,
            relevant: relevant.len(),
        });
    }
    if corpus.len() < pool_size {
        return Err(RetrievalError::CorpusTooSmall {
            corpus: corpus.len(),
            pool_size,
        });
    }

    let distractors: Vec<usize> = (0..corpus.len())
        .filter(|&i| !relevant.contains(corpus[i].as_str()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = rand::seq::index::sample(&mut rng, distractors.len(), pool_size - relevant.len());
    let mut keep = vec![false; corpus.len()];
    for i in chosen.iter() {
        keep[distractors[i]] = true;
    }
    Ok(corpus
        .iter()
        .enumerate()
        .filter(|(i, id)| keep[*i] || relevant.contains(id.as_str()))
        .map(|(_, id)| id.clone())
        .collect())
}
