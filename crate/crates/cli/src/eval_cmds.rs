use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use asmsearch::asm::{parse_assembly, tokenize, AssemblyFunction};
use asmsearch::contrastive::{
    infonce_grad_with, infonce_loss_with, read_aemb, EmbeddingMatrix, InfoNceConfig, Matrix, Similarity,
    DEFAULT_TEMPERATURE,
};
use asmsearch::emu::{runtime_similarity, DEFAULT_MAX_INSTRUCTIONS};
use asmsearch::metrics::{corpus_mean, score_all, SequenceScores};
use asmsearch::retrieval::{EvalConfig, Evaluator, QueryRecord, DEFAULT_POOL_SIZE};
use clap::Args;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::input::{open, output, read_jsonl, write_json_line, Malformed};
use crate::workers;
use crate::GlobalOpts;

#[derive(Debug, Args)]
pub struct EvalSeqArgs {
    /// Reference records (JSON lines with at least `id` and `assembly_text`).
    #[arg(long)]
    pub reference: PathBuf,
    /// Candidate records, matched to references by id.
    #[arg(long)]
    pub candidate: PathBuf,
    /// Per-pair scores as CSV.
    #[arg(long)]
    pub per_pair: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalRuntimeArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub candidate: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_INSTRUCTIONS)]
    pub max_instructions: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InfoNceArgs {
    /// Text embeddings (AEMB); row i pairs with row i of --asms.
    #[arg(long)]
    pub texts: PathBuf,
    /// Assembly embeddings (AEMB).
    #[arg(long)]
    pub asms: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TEMPERATURE)]
    pub temperature: f64,
    /// Normalize rows before taking dot products.
    #[arg(long)]
    pub cosine: bool,
    /// Write both gradient matrices as JSON.
    #[arg(long)]
    pub grad_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalRetrievalArgs {
    /// Judgments: JSON lines of {id, text, relevant_ids}.
    #[arg(long)]
    pub queries: PathBuf,
    /// Query embeddings (AEMB), ids matching the judgments.
    #[arg(long)]
    pub query_emb: PathBuf,
    /// Corpus embeddings (AEMB) from which the pool is drawn.
    #[arg(long)]
    pub pool_emb: PathBuf,
    #[arg(long, default_value_t = DEFAULT_POOL_SIZE)]
    pub pool_size: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 5, 10, 20])]
    pub k: Vec<usize>,
    #[arg(long)]
    pub cosine: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
struct AssemblyRecord {
    id: String,
    assembly_text: String,
}

struct Pair {
    id: String,
    reference: (usize, String),
    candidate: (usize, String),
}

fn load_records(path: &Path) -> anyhow::Result<Vec<(usize, AssemblyRecord)>> {
    let records: Vec<(usize, AssemblyRecord)> = read_jsonl(path)?;
    let mut seen = HashSet::new();
    for (line, r) in &records {
        if !seen.insert(r.id.as_str()) {
            return Err(Malformed::new(path, *line, format!("duplicate id `{}`", r.id)).into());
        }
    }
    Ok(records)
}

/// Pairs in reference order; both files must hold the same ids.
fn aligned(reference: &Path, candidate: &Path) -> anyhow::Result<Vec<Pair>> {
    let refs = load_records(reference)?;
    let cands = load_records(candidate)?;
    let mut by_id: HashMap<String, (usize, String)> = cands
        .into_iter()
        .map(|(line, r)| (r.id, (line, r.assembly_text)))
        .collect();
    let mut pairs = Vec::with_capacity(refs.len());
    for (line, r) in refs {
        let Some(c) = by_id.remove(&r.id) else {
            return Err(Malformed::new(reference, line, format!("no candidate with id `{}`", r.id)).into());
        };
        pairs.push(Pair { id: r.id, reference: (line, r.assembly_text), candidate: c });
    }
    if let Some((line, id)) = by_id.iter().map(|(id, (line, _))| (*line, id)).min() {
        return Err(Malformed::new(candidate, line, format!("no reference with id `{id}`")).into());
    }
    Ok(pairs)
}

fn parse_pair(p: &Pair, reference: &Path, candidate: &Path) -> Result<(AssemblyFunction, AssemblyFunction), Malformed> {
    let a = parse_assembly(&p.reference.1).map_err(|e| Malformed::new(reference, p.reference.0, e))?;
    let b = parse_assembly(&p.candidate.1).map_err(|e| Malformed::new(candidate, p.candidate.0, e))?;
    Ok((a, b))
}

#[derive(Serialize)]
struct SeqReport {
    bleu: f64,
    rouge_l: f64,
    meteor: f64,
    n_pairs: usize,
}

pub fn eval_seq(args: &EvalSeqArgs, pool: &ThreadPool) -> anyhow::Result<()> {
    let pairs = aligned(&args.reference, &args.candidate)?;
    let scored = workers::map(pool, &pairs, |p| {
        let (reference, candidate) = parse_pair(p, &args.reference, &args.candidate)?;
        let s = score_all(&tokenize(&candidate), &tokenize(&reference))
            .map_err(|e| Malformed::new(&args.candidate, p.candidate.0, format!("record `{}`: {e}", p.id)))?;
        Ok::<SequenceScores, Malformed>(s)
    });
    let scores = scored.into_iter().collect::<Result<Vec<_>, _>>()?;
    if let Some(path) = &args.per_pair {
        let mut csv = output(Some(path))?;
        writeln!(csv, "id,bleu,rouge_l,meteor")?;
        for (p, s) in pairs.iter().zip(&scores) {
            writeln!(csv, "{},{},{},{}", csv_field(&p.id), s.bleu, s.rouge_l, s.meteor)?;
        }
        csv.flush()?;
    }
    let mean = corpus_mean(&scores).unwrap_or(SequenceScores { bleu: 0.0, rouge_l: 0.0, meteor: 0.0 });
    let mut out = output(args.out.as_deref())?;
    write_json_line(
        &mut out,
        &SeqReport { bleu: mean.bleu, rouge_l: mean.rouge_l, meteor: mean.meteor, n_pairs: scores.len() },
    )?;
    out.flush()?;
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct RuntimeLine<'a> {
    id: &'a str,
    rax_equal: bool,
    stack_equal: bool,
    trace_equal: bool,
    value: f64,
    halt_a: &'static str,
    halt_b: &'static str,
}

#[derive(Serialize)]
struct RuntimeSummary {
    mean: f64,
    n_pairs: usize,
}

pub fn eval_runtime(args: &EvalRuntimeArgs, g: &GlobalOpts, pool: &ThreadPool) -> anyhow::Result<()> {
    let pairs = aligned(&args.reference, &args.candidate)?;
    let results = workers::map(pool, &pairs, |p| {
        let (a, b) = parse_pair(p, &args.reference, &args.candidate)?;
        let (s, ta, tb) = runtime_similarity(&a, &b, g.seed, args.max_instructions);
        Ok::<_, Malformed>((s, ta.halt_reason, tb.halt_reason))
    });
    let mut out = output(args.out.as_deref())?;
    let mut total = 0.0;
    for (p, r) in pairs.iter().zip(results) {
        let (s, ha, hb) = r?;
        total += s.value;
        write_json_line(
            &mut out,
            &RuntimeLine {
                id: &p.id,
                rax_equal: s.rax_equal,
                stack_equal: s.stack_equal,
                trace_equal: s.trace_equal,
                value: s.value,
                halt_a: ha.as_str(),
                halt_b: hb.as_str(),
            },
        )?;
    }
    let n = pairs.len();
    let mean = if n == 0 { 0.0 } else { total / n as f64 };
    write_json_line(&mut out, &RuntimeSummary { mean, n_pairs: n })?;
    out.flush()?;
    Ok(())
}

fn load_aemb(path: &Path) -> anyhow::Result<EmbeddingMatrix> {
    read_aemb(open(path)?).map_err(|e| Malformed::binary(path, e).into())
}

#[derive(Serialize)]
struct GradDump {
    texts: Vec<Vec<f64>>,
    asms: Vec<Vec<f64>>,
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows).map(|i| m.row(i).to_vec()).collect()
}

pub fn infonce(args: &InfoNceArgs) -> anyhow::Result<()> {
    let texts = load_aemb(&args.texts)?;
    let asms = load_aemb(&args.asms)?;
    let config = InfoNceConfig {
        temperature: args.temperature,
        similarity: if args.cosine { Similarity::Cosine } else { Similarity::Dot },
    };
    let report = infonce_loss_with(&texts, &asms, &config)?;
    if let Some(path) = &args.grad_out {
        let g = infonce_grad_with(&texts, &asms, &config)?;
        let mut w = output(Some(path))?;
        write_json_line(&mut w, &GradDump { texts: rows(&g.texts), asms: rows(&g.asms) })?;
        w.flush()?;
    }
    let mut out = output(None)?;
    write_json_line(&mut out, &report)?;
    out.flush()?;
    Ok(())
}

pub fn eval_retrieval(args: &EvalRetrievalArgs, g: &GlobalOpts, pool: &ThreadPool) -> anyhow::Result<()> {
    let judged: Vec<(usize, QueryRecord)> = read_jsonl(&args.queries)?;
    for (line, q) in &judged {
        q.validate().map_err(|e| Malformed::new(&args.queries, *line, e))?;
    }
    let queries: Vec<QueryRecord> = judged.into_iter().map(|(_, q)| q).collect();
    let query_emb = load_aemb(&args.query_emb)?;
    let corpus_emb = load_aemb(&args.pool_emb)?;
    eprintln!(
        "eval-retrieval: {} queries, corpus of {}, pool of {}",
        queries.len(),
        corpus_emb.len(),
        args.pool_size
    );
    let config = EvalConfig {
        pool_size: args.pool_size,
        ks: args.k.clone(),
        seed: g.seed,
        similarity: if args.cosine { Similarity::Cosine } else { Similarity::Dot },
    };
    let evaluator = Evaluator::new(&queries, &query_emb, &corpus_emb, config)?;
    let indices: Vec<usize> = (0..evaluator.n_queries()).collect();
    let rankings = workers::map(pool, &indices, |&i| evaluator.rank(i));
    let report = evaluator.report(&rankings)?;
    let mut out = output(args.out.as_deref())?;
    write_json_line(&mut out, &report)?;
    out.flush()?;
    Ok(())
}
