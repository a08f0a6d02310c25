use crate::asm::{tokenize, tokenize_text, AssemblyFunction};
use crate::emu::fnv1a64;

/// Hashed bag-of-token counts. A trivial embedder for exercising the
/// retrieval plumbing; it carries no learned semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BagOfTokens {
    pub dim: usize,
}

impl BagOfTokens {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        BagOfTokens { dim }
    }

    /// Token `t` increments bucket `fnv1a64(lowercase(t)) mod dim`.
    pub fn embed_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for t in tokens {
            let h = fnv1a64(t.as_ref().to_lowercase().as_bytes());
            v[(h % self.dim as u64) as usize] += 1.0;
        }
        v
    }

    pub fn embed_text(&self, text: &str) -> Vec<f64> {
        self.embed_tokens(&tokenize_text(text))
    }

    pub fn embed_assembly(&self, f: &AssemblyFunction) -> Vec<f64> {
        self.embed_tokens(&tokenize(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_sum_to_token_count() {
        let e = BagOfTokens::new(16);
        let v = e.embed_text("sort the array in place");
        assert_eq!(v.iter().sum::<f64>(), 5.0);
        assert_eq!(e.embed_text("Sort"), e.embed_text("sort"));
    }
}
