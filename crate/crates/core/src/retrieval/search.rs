use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use super::{
    build_pool, mean_ap, recall_at_k, EvalReport, QueryRecord, RetrievalError, RetrievalResult,
    DEFAULT_KS, DEFAULT_POOL_SIZE,
};
use crate::contrastive::{EmbeddingMatrix, Similarity};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn score(query: &[f64], query_norm: f64, row: &[f64], similarity: Similarity) -> f64 {
    let s = match similarity {
        Similarity::Dot => dot(query, row),
        Similarity::Cosine => {
            let d = query_norm * norm(row);
            if d == 0.0 {
                0.0
            } else {
                dot(query, row) / d
            }
        }
    };
    // fold -0.0 into 0.0 so that equal scores tie-break on id
    s + 0.0
}

/// Descending score, then ascending id.
fn by_rank(a: &(f64, &str), b: &(f64, &str)) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1))
}

fn scored<'a>(query: &[f64], pool: &'a EmbeddingMatrix, similarity: Similarity) -> Vec<(f64, &'a str)> {
    let qn = norm(query);
    (0..pool.len())
        .map(|i| (score(query, qn, pool.row(i), similarity), pool.ids()[i].as_str()))
        .collect()
}

fn into_result(query_id: &str, ranked: Vec<(f64, &str)>) -> RetrievalResult {
    let (scores, ids) = ranked.into_iter().map(|(s, id)| (s, id.to_string())).unzip();
    RetrievalResult {
        query_id: query_id.to_string(),
        ranked_ids: ids,
        scores,
    }
}

/// The `k` best pool rows for `query`. Ties are broken by ascending id, so
/// the result does not depend on the order of pool rows.
pub fn search_topk(
    query_id: &str,
    query: &[f64],
    pool: &EmbeddingMatrix,
    k: usize,
    similarity: Similarity,
) -> Result<RetrievalResult, RetrievalError> {
    if k == 0 {
        return Err(RetrievalError::InvalidK);
    }
    if k > pool.len() {
        return Err(RetrievalError::KExceedsPool { k, pool: pool.len() });
    }
    if query.len() != pool.dim() {
        return Err(RetrievalError::ShapeMismatch(format!(
            "query has {} dimensions, pool has {}",
            query.len(),
            pool.dim()
        )));
    }
    let mut all = scored(query, pool, similarity);
    if k < all.len() {
        all.select_nth_unstable_by(k - 1, by_rank);
        all.truncate(k);
    }
    all.sort_unstable_by(by_rank);
    Ok(into_result(query_id, all))
}

/// Full ranking of the pool.
pub fn rank_all(
    query_id: &str,
    query: &[f64],
    pool: &EmbeddingMatrix,
    similarity: Similarity,
) -> Result<RetrievalResult, RetrievalError> {
    search_topk(query_id, query, pool, pool.len(), similarity)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalConfig {
    pub pool_size: usize,
    pub ks: Vec<usize>,
    pub seed: u64,
    pub similarity: Similarity,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            pool_size: DEFAULT_POOL_SIZE,
            ks: DEFAULT_KS.to_vec(),
            seed: 0,
            similarity: Similarity::Dot,
        }
    }
}

/// Retrieval evaluation split into independent per-query steps, so callers
/// may rank queries in any order or in parallel and still get the same
/// report.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    queries: &'a [QueryRecord],
    query_rows: Vec<&'a [f64]>,
    pool: EmbeddingMatrix,
    config: EvalConfig,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        queries: &'a [QueryRecord],
        query_emb: &'a EmbeddingMatrix,
        corpus_emb: &EmbeddingMatrix,
        config: EvalConfig,
    ) -> Result<Self, RetrievalError> {
        if queries.is_empty() {
            return Err(RetrievalError::NoQueries);
        }
        if query_emb.dim() != corpus_emb.dim() {
            return Err(RetrievalError::ShapeMismatch(format!(
                "query embeddings have {} dimensions, corpus embeddings {}",
                query_emb.dim(),
                corpus_emb.dim()
            )));
        }
        if config.ks.contains(&0) {
            return Err(RetrievalError::InvalidK);
        }
        if let Some(&k) = config.ks.iter().find(|&&k| k > config.pool_size) {
            return Err(RetrievalError::KExceedsPool { k, pool: config.pool_size });
        }
        let q_index: HashMap<&str, usize> = query_emb
            .ids()
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let mut query_rows = Vec::with_capacity(queries.len());
        for q in queries {
            q.validate()?;
            let i = q_index
                .get(q.id.as_str())
                .ok_or_else(|| RetrievalError::MissingEmbedding(q.id.clone()))?;
            query_rows.push(query_emb.row(*i));
        }

        let pool_ids = build_pool(corpus_emb.ids(), queries, config.pool_size, config.seed)?;
        let c_index: HashMap<&str, usize> = corpus_emb
            .ids()
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let mut values = Vec::with_capacity(pool_ids.len() * corpus_emb.dim());
        for id in &pool_ids {
            values.extend_from_slice(corpus_emb.row(c_index[id.as_str()]));
        }
        let pool = EmbeddingMatrix::new(pool_ids, corpus_emb.dim(), values)
            .map_err(|e| RetrievalError::ShapeMismatch(e.to_string()))?;
        Ok(Evaluator {
            queries,
            query_rows,
            pool,
            config,
        })
    }

    pub fn n_queries(&self) -> usize {
        self.queries.len()
    }

    pub fn pool(&self) -> &EmbeddingMatrix {
        &self.pool
    }

    /// Full ranking of the pool for query `i`.
    pub fn rank(&self, i: usize) -> RetrievalResult {
        rank_all(&self.queries[i].id, self.query_rows[i], &self.pool, self.config.similarity)
            .expect("shapes validated in Evaluator::new")
    }

    pub fn report(&self, rankings: &[RetrievalResult]) -> Result<EvalReport, RetrievalError> {
        let mut recall_at = BTreeMap::new();
        for &k in &self.config.ks {
            recall_at.insert(k, recall_at_k(rankings, self.queries, k)?);
        }
        Ok(EvalReport {
            recall_at,
            map: mean_ap(rankings, self.queries)?,
            n_queries: self.queries.len(),
            pool_size: self.pool.len(),
        })
    }

    pub fn run(&self) -> Result<EvalReport, RetrievalError> {
        let rankings: Vec<_> = (0..self.n_queries()).map(|i| self.rank(i)).collect();
        self.report(&rankings)
    }
}
