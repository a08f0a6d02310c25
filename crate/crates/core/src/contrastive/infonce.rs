use serde::Serialize;

use super::embedding::{dot, Matrix};
use super::{ContrastiveError, EmbeddingMatrix};

pub const DEFAULT_TEMPERATURE: f64 = 0.07;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Similarity {
    /// `t · a`
    #[default]
    Dot,
    /// `t · a / (|t| |a|)`
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoNceConfig {
    pub temperature: f64,
    pub similarity: Similarity,
}

impl Default for InfoNceConfig {
    fn default() -> Self {
        InfoNceConfig {
            temperature: DEFAULT_TEMPERATURE,
            similarity: Similarity::Dot,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossReport {
    pub l1: f64,
    pub l2: f64,
    pub total: f64,
    pub temperature: f64,
}

/// Gradients of the total loss.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoNceGrad {
    pub texts: Matrix,
    pub asms: Matrix,
}

/// Gradients of each loss term separately.
#[derive(Debug, Clone, PartialEq)]
pub struct GradComponents {
    pub l1_texts: Matrix,
    pub l1_asms: Matrix,
    pub l2_texts: Matrix,
    pub l2_asms: Matrix,
}

/// Sum by recursive halving; the split points depend only on the length, so
/// the result is independent of how callers schedule the work.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn check(
    texts: &EmbeddingMatrix,
    asms: &EmbeddingMatrix,
    config: &InfoNceConfig,
) -> Result<(), ContrastiveError> {
    if texts.len() != asms.len() || texts.dim() != asms.dim() {
        return Err(ContrastiveError::ShapeMismatch(format!(
            "texts {}x{} vs assemblies {}x{}",
            texts.len(),
            texts.dim(),
            asms.len(),
            asms.dim()
        )));
    }
    if !(config.temperature > 0.0 && config.temperature.is_finite()) {
        return Err(ContrastiveError::NonPositiveTemperature(config.temperature));
    }
    Ok(())
}

/// `scores[i][j] = x_i · y_j / T`
fn scaled_similarities(x: &EmbeddingMatrix, y: &EmbeddingMatrix, temperature: f64) -> Matrix {
    let n = x.len();
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s.data[i * n + j] = dot(x.row(i), y.row(j)) / temperature;
        }
    }
    s
}

fn transpose(s: &Matrix) -> Matrix {
    let mut t = Matrix::zeros(s.cols, s.rows);
    for i in 0..s.rows {
        for j in 0..s.cols {
            t.data[j * s.rows + i] = s.get(i, j);
        }
    }
    t
}

/// Per row: `(max, log Σ_{j != argmax} exp(s_j - max))` evaluated as
/// `ln_1p`, so that the loss keeps full relative precision when the
/// off-diagonal mass is tiny.
fn row_log_partition(row: &[f64]) -> (f64, usize, f64) {
    let (arg, max) = row
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(ai, am), (i, v)| if v > am { (i, v) } else { (ai, am) });
    let rest: Vec<f64> = row
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != arg)
        .map(|(_, &v)| (v - max).exp())
        .collect();
    (max, arg, pairwise_sum(&rest).ln_1p())
}

/// Mean over rows of `logsumexp(row) - row[i]`.
fn directional_loss(s: &Matrix) -> f64 {
    let terms: Vec<f64> = (0..s.rows)
        .map(|i| {
            let (max, _, log1p) = row_log_partition(s.row(i));
            (max - s.get(i, i)) + log1p
        })
        .collect();
    pairwise_sum(&terms) / s.rows as f64
}

/// `(softmax(row) - e_i) / n` for every row.
fn directional_score_grad(s: &Matrix) -> Matrix {
    let n = s.rows;
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        let (max, _, log1p) = row_log_partition(s.row(i));
        let lse = max + log1p;
        for j in 0..n {
            let p = (s.get(i, j) - lse).exp();
            let delta = if i == j { 1.0 } else { 0.0 };
            g.data[i * n + j] = (p - delta) / n as f64;
        }
    }
    g
}

fn prepared(
    texts: &EmbeddingMatrix,
    asms: &EmbeddingMatrix,
    config: &InfoNceConfig,
) -> Result<(EmbeddingMatrix, EmbeddingMatrix), ContrastiveError> {
    check(texts, asms, config)?;
    Ok(match config.similarity {
        Similarity::Dot => (texts.clone(), asms.clone()),
        Similarity::Cosine => (texts.normalized()?, asms.normalized()?),
    })
}

pub fn infonce_loss(
    texts: &EmbeddingMatrix,
    asms: &EmbeddingMatrix,
    temperature: f64,
) -> Result<LossReport, ContrastiveError> {
    infonce_loss_with(
        texts,
        asms,
        &InfoNceConfig {
            temperature,
            ..Default::default()
        },
    )
}

pub fn infonce_loss_with(
    texts: &EmbeddingMatrix,
    asms: &EmbeddingMatrix,
    config: &InfoNceConfig,
) -> Result<LossReport, ContrastiveError> {
    let (t, a) = prepared(texts, asms, config)?;
    let s = scaled_similarities(&t, &a, config.temperature);
    let l1 = directional_loss(&s);
    let l2 = directional_loss(&transpose(&s));
    Ok(LossReport {
        l1,
        l2,
        total: l1 + l2,
        temperature: config.temperature,
    })
}

pub fn infonce_grad(
    texts: &EmbeddingMatrix,
    asms: &EmbeddingMatrix,
    temperature: f64,
) -> Result<InfoNceGrad, ContrastiveError> {
    infonce_grad_with(
        texts,
        asms,
        &InfoNceConfig {
            temperature,
            ..Default::default()
        },
    )
}

pub fn infonce_grad_with(
    texts: &EmbeddingMatrix,
    asms: &EmbeddingMatrix,
    config: &InfoNceConfig,
) -> Result<InfoNceGrad, ContrastiveError> {
    let c = infonce_grad_components(texts, asms, config)?;
    let add = |a: &Matrix, b: &Matrix| Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x + y).collect(),
    };
    Ok(InfoNceGrad {
        texts: add(&c.l1_texts, &c.l2_texts),
        asms: add(&c.l1_asms, &c.l2_asms),
    })
}

/// `out_i = (1/T) Σ_j g[i][j] y_j`, accumulated in ascending `j`.
fn weighted_rows(g: &Matrix, y: &EmbeddingMatrix, temperature: f64) -> Matrix {
    let (n, d) = (g.rows, y.dim());
    let mut out = Matrix::zeros(n, d);
    for i in 0..n {
        let row = out.row_mut(i);
        for j in 0..n {
            let w = g.get(i, j);
            for (o, v) in row.iter_mut().zip(y.row(j)) {
                *o += w * v;
            }
        }
        for o in row.iter_mut() {
            *o /= temperature;
        }
    }
    out
}

/// Pulls a gradient taken w.r.t. normalized rows back to the raw rows:
/// `(g - (g · u) u) / |x|`.
fn through_normalization(g: Matrix, raw: &EmbeddingMatrix, unit: &EmbeddingMatrix) -> Matrix {
    let mut out = g;
    for i in 0..raw.len() {
        let norm = dot(raw.row(i), raw.row(i)).sqrt();
        let u = unit.row(i);
        let gu = dot(out.row(i), u);
        for (o, ui) in out.row_mut(i).iter_mut().zip(u) {
            *o = (*o - gu * ui) / norm;
        }
    }
    out
}

pub fn infonce_grad_components(
    texts: &EmbeddingMatrix,
    asms: &EmbeddingMatrix,
    config: &InfoNceConfig,
) -> Result<GradComponents, ContrastiveError> {
    let (t, a) = prepared(texts, asms, config)?;
    let temp = config.temperature;
    let s = scaled_similarities(&t, &a, temp);
    let g1 = directional_score_grad(&s);
    // Gradient of L2 w.r.t. s, expressed in the transposed index space.
    let g2t = directional_score_grad(&transpose(&s));
    let g2 = transpose(&g2t);

    let mut c = GradComponents {
        l1_texts: weighted_rows(&g1, &a, temp),
        l1_asms: weighted_rows(&transpose(&g1), &t, temp),
        l2_texts: weighted_rows(&g2, &a, temp),
        l2_asms: weighted_rows(&g2t, &t, temp),
    };
    if config.similarity == Similarity::Cosine {
        c.l1_texts = through_normalization(c.l1_texts, texts, &t);
        c.l2_texts = through_normalization(c.l2_texts, texts, &t);
        c.l1_asms = through_normalization(c.l1_asms, asms, &a);
        c.l2_asms = through_normalization(c.l2_asms, asms, &a);
    }
    Ok(c)
}
