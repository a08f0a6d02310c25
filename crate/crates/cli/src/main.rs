//! `asmsearch`: dataset construction and evaluation for assembly code search.

mod dataset_cmds;
mod embed_cmd;
mod eval_cmds;
mod input;
mod workers;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use input::Malformed;

#[derive(Debug, Parser)]
#[command(name = "asmsearch", version, about = "Build and evaluate natural-language to assembly search corpora")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct GlobalOpts {
    /// Seed for every pseudo-random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; output does not depend on this value.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clean, filter and optionally length-mix a pair corpus.
    BuildDataset(dataset_cmds::BuildDatasetArgs),
    /// Apply docstring cleaning to every record of a corpus.
    CleanDocstrings(dataset_cmds::CleanDocstringsArgs),
    /// BLEU, ROUGE-L and METEOR between candidate and reference assembly.
    EvalSeq(eval_cmds::EvalSeqArgs),
    /// Emulated runtime similarity between candidate and reference assembly.
    EvalRuntime(eval_cmds::EvalRuntimeArgs),
    /// InfoNCE loss (and optionally gradients) for a batch of embeddings.
    Infonce(eval_cmds::InfoNceArgs),
    /// Recall@k and MAP over a sampled candidate pool.
    EvalRetrieval(eval_cmds::EvalRetrievalArgs),
    /// Check that every record of a corpus parses.
    ParseCheck(ParseCheckArgs),
    /// Bag-of-token-count embeddings for corpus assembly or query text.
    Embed(embed_cmd::EmbedArgs),
}

#[derive(Debug, Args)]
struct ParseCheckArgs {
    corpus: PathBuf,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let pool = workers::pool(cli.global.workers)?;
    let g = cli.global;
    match cli.command {
        Command::BuildDataset(a) => dataset_cmds::build_dataset(&a, &g, &pool),
        Command::CleanDocstrings(a) => dataset_cmds::clean_docstrings(&a, &pool),
        Command::EvalSeq(a) => eval_cmds::eval_seq(&a, &pool),
        Command::EvalRuntime(a) => eval_cmds::eval_runtime(&a, &g, &pool),
        Command::Infonce(a) => eval_cmds::infonce(&a),
        Command::EvalRetrieval(a) => eval_cmds::eval_retrieval(&a, &g, &pool),
        Command::ParseCheck(a) => dataset_cmds::parse_check(&a.corpus, &pool),
        Command::Embed(a) => embed_cmd::embed(&a, &pool),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Malformed>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
