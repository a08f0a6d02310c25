//! Corpus construction and evaluation kernels for natural-language to
//! assembly code search.
//!
//! - [`asm`]: Intel-syntax x86-64 parsing and tokenization.
//! - [`dataset`]: source/assembly pair records, filtering, docstring cleaning,
//!   compilation-profile assignment and length-bucket mixing.
//! - [`metrics`]: BLEU, ROUGE-L and METEOR over assembly token streams.
//! - [`emu`]: a deterministic micro-emulator and the three-indicator runtime
//!   similarity score.
//! - [`contrastive`]: in-batch InfoNCE loss and analytic gradients.
//! - [`retrieval`]: brute-force search, recall@k and MAP.

pub mod asm;
pub mod contrastive;
pub mod dataset;
pub mod emu;
pub mod metrics;
pub mod retrieval;
