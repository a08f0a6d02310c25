use std::collections::HashSet;

use super::ContrastiveError;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `n` embeddings of dimension `d` with unique row ids.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    ids: Vec<String>,
    values: Matrix,
}

impl EmbeddingMatrix {
    pub fn new(ids: Vec<String>, dim: usize, values: Vec<f64>) -> Result<Self, ContrastiveError> {
        let n = ids.len();
        if n == 0 || dim == 0 {
            return Err(ContrastiveError::Empty);
        }
        if values.len() != n * dim {
            return Err(ContrastiveError::ShapeMismatch(format!(
                "{} values for {n} rows of dimension {dim}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(ContrastiveError::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        let mut seen = HashSet::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if id.is_empty() || id.contains('\n') {
                return Err(ContrastiveError::InvalidId(i));
            }
            if !seen.insert(id.as_str()) {
                return Err(ContrastiveError::DuplicateId(id.clone()));
            }
        }
        Ok(EmbeddingMatrix {
            ids,
            values: Matrix {
                rows: n,
                cols: dim,
                data: values,
            },
        })
    }

    /// Rows named `0..n`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ContrastiveError> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(ContrastiveError::ShapeMismatch("ragged rows".into()));
        }
        let ids = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::new(ids, dim, rows.concat())
    }

    pub fn len(&self) -> usize {
        self.values.rows
    }

    pub fn is_empty(&self) -> bool {
        self.values.rows == 0
    }

    pub fn dim(&self) -> usize {
        self.values.cols
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// Rows reordered so that row `k` of the result is row `order[k]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self, ContrastiveError> {
        let d = self.dim();
        let mut values = Vec::with_capacity(order.len() * d);
        let mut ids = Vec::with_capacity(order.len());
        for &i in order {
            if i >= self.len() {
                return Err(ContrastiveError::ShapeMismatch(format!("row {i} out of range")));
            }
            values.extend_from_slice(self.row(i));
            ids.push(self.ids[i].clone());
        }
        Self::new(ids, d, values)
    }

    /// Each row divided by its Euclidean norm.
    pub fn normalized(&self) -> Result<Self, ContrastiveError> {
        let mut out = self.clone();
        for i in 0..self.len() {
            let norm = dot(self.row(i), self.row(i)).sqrt();
            if norm == 0.0 {
                return Err(ContrastiveError::ZeroNorm(i));
            }
            for v in out.values.row_mut(i) {
                *v /= norm;
            }
        }
        Ok(out)
    }
}

/// Dot product accumulated left to right.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
