use std::io::Write;
use std::path::PathBuf;

use asmsearch::contrastive::{write_aemb, EmbeddingMatrix};
use asmsearch::dataset::parse_record_line;
use asmsearch::retrieval::{BagOfTokens, QueryRecord};
use clap::{Args, ValueEnum};
use rayon::ThreadPool;

use crate::input::{output, parse_line, LineChunks, Malformed};
use crate::workers::{self, CHUNK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbedKind {
    /// Assembly of each pair record in a corpus.
    Assembly,
    /// Text of each query in a judgments file.
    Query,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub kind: EmbedKind,
    #[arg(long, default_value_t = 256)]
    pub dim: usize,
    /// Output AEMB file.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn embed(args: &EmbedArgs, pool: &ThreadPool) -> anyhow::Result<()> {
    anyhow::ensure!(args.dim > 0, "--dim must be positive");
    let embedder = BagOfTokens::new(args.dim);
    let mut ids = Vec::new();
    let mut values = Vec::new();
    for chunk in LineChunks::new(&args.input, CHUNK)? {
        let chunk = chunk?;
        let rows = workers::map(pool, &chunk, |(line, text)| {
            let bad = |e: &dyn std::fmt::Display| Malformed::new(&args.input, *line, e);
            match args.kind {
                EmbedKind::Assembly => {
                    let r = parse_record_line(text, *line).map_err(|e| Malformed::dataset(&args.input, *line, e))?;
                    let f = r.assembly().map_err(|e| bad(&e))?;
                    Ok::<_, Malformed>((r.id, embedder.embed_assembly(&f)))
                }
                EmbedKind::Query => {
                    let q: QueryRecord = parse_line(&args.input, *line, text)?;
                    Ok((q.id, embedder.embed_text(&q.text)))
                }
            }
        });
        for r in rows {
            let (id, v) = r?;
            ids.push(id);
            values.extend(v);
        }
    }
    let m = EmbeddingMatrix::new(ids, args.dim, values)?;
    let mut out = output(Some(&args.out))?;
    write_aemb(&mut out, &m)?;
    out.flush()?;
    eprintln!("embed: wrote {} x {} to {}", m.len(), m.dim(), args.out.display());
    Ok(())
}
