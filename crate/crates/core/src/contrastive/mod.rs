//! In-batch InfoNCE objective over paired text/assembly embeddings.
//!
//! For a batch of `n` pairs with similarity `s(i, j) = t_i · a_j / T`:
//!
//! ```text
//! L1 = -(1/n) Σ_i log( exp(s(i,i)) / Σ_j exp(s(i,j)) )     text -> assembly
//! L2 = -(1/n) Σ_i log( exp(s(i,i)) / Σ_j exp(s(j,i)) )     assembly -> text
//! L  = L1 + L2
//! ```
//!
//! Similarities are raw dot products unless [`Similarity::Cosine`] is chosen.

mod aemb;
mod embedding;
mod infonce;

pub use aemb::{read_aemb, write_aemb, AembError, AEMB_MAGIC, AEMB_VERSION};
pub use embedding::{EmbeddingMatrix, Matrix};
pub use infonce::{
    infonce_grad, infonce_grad_components, infonce_grad_with, infonce_loss, infonce_loss_with,
    pairwise_sum, GradComponents, InfoNceConfig, InfoNceGrad, LossReport, Similarity,
    DEFAULT_TEMPERATURE,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ContrastiveError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("temperature must be positive and finite, got {0}")]
    NonPositiveTemperature(f64),
    #[error("embedding matrix must have at least one row and one column")]
    Empty,
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("row {0} has zero norm and cannot be normalized")]
    ZeroNorm(usize),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("id at row {0} is empty or contains a newline")]
    InvalidId(usize),
}
