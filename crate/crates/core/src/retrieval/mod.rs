//! Brute-force embedding search and ranking metrics.
//!
//! Recall@k is normalized per query by `min(|relevant|, k)`, so a query with
//! more relevant functions than retrieved slots can still reach 1.0. Average
//! precision is normalized by the number of relevant functions and averaged
//! over queries to give MAP.

mod embed;
mod metrics;
mod pool;
mod search;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use embed::BagOfTokens;
pub use metrics::{average_precision, mean_ap, recall_at_k};
pub use pool::build_pool;
pub use search::{rank_all, search_topk, EvalConfig, Evaluator};

pub const DEFAULT_POOL_SIZE: usize = 10_000;
pub const DEFAULT_KS: [usize; 4] = [1, 5, 10, 20];

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum RetrievalError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("k = {k} exceeds the pool of {pool}")]
    KExceedsPool { k: usize, pool: usize },
    #[error("k must be at least 1")]
    InvalidK,
    #[error("no result for query `{0}`")]
    MissingResult(String),
    #[error("no embedding for `{0}`")]
    MissingEmbedding(String),
    #[error("pool size {pool_size} cannot hold {relevant} relevant ids")]
    PoolTooSmall { pool_size: usize, relevant: usize },
    #[error("corpus of {corpus} ids is smaller than the pool size {pool_size}")]
    CorpusTooSmall { corpus: usize, pool_size: usize },
    #[error("relevant id `{0}` is not in the corpus")]
    UnknownRelevantId(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("query `{0}` has no relevant ids")]
    NoRelevant(String),
    #[error("no queries to evaluate")]
    NoQueries,
}

/// One line of a judgments file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub id: String,
    pub text: String,
    pub relevant_ids: BTreeSet<String>,
}

impl QueryRecord {
    pub fn validate(&self) -> Result<(), RetrievalError> {
        if self.relevant_ids.is_empty() {
            return Err(RetrievalError::NoRelevant(self.id.clone()));
        }
        Ok(())
    }
}

/// Ranked ids for one query, best first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalResult {
    pub query_id: String,
    pub ranked_ids: Vec<String>,
    pub scores: Vec<f64>,
}

impl RetrievalResult {
    pub fn truncated(&self, k: usize) -> RetrievalResult {
        let k = k.min(self.ranked_ids.len());
        RetrievalResult {
            query_id: self.query_id.clone(),
            ranked_ids: self.ranked_ids[..k].to_vec(),
            scores: self.scores[..k].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub recall_at: BTreeMap<usize, f64>,
    pub map: f64,
    pub n_queries: usize,
    pub pool_size: usize,
}
