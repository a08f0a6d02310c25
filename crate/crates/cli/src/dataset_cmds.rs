use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use asmsearch::dataset::{
    assign_profile, clean_docstring, filter_pairs, has_inlined_callees_heuristic, mix_by_length,
    parse_record_line, strip_source_comments, FilterReport, MixConfig, PairRecord, DEFAULT_MIN_BODY_LINES,
    DEFAULT_MIN_WORDS,
};
use clap::Args;
use rayon::ThreadPool;

use crate::input::{output, write_json_line, LineChunks, Malformed};
use crate::workers::{self, CHUNK};
use crate::GlobalOpts;

#[derive(Debug, Args)]
pub struct BuildDatasetArgs {
    /// Input corpus (JSON lines of pair records).
    #[arg(long)]
    pub input: PathBuf,
    /// Output corpus.
    #[arg(long)]
    pub out: PathBuf,
    /// Drop records whose source body has fewer lines than this.
    #[arg(long, default_value_t = DEFAULT_MIN_BODY_LINES)]
    pub min_body_lines: usize,
    /// Remove comments from source bodies before counting lines.
    #[arg(long)]
    pub strip_comments: bool,
    /// Clean docstrings; too-short ones become null.
    #[arg(long)]
    pub clean_docstrings: bool,
    #[arg(long, default_value_t = DEFAULT_MIN_WORDS)]
    pub min_words: usize,
    /// Replace each profile with a seeded draw from the compiler/level grid.
    #[arg(long)]
    pub assign_profiles: bool,
    /// Also flag records whose listing defines several global symbols.
    #[arg(long)]
    pub inline_heuristic: bool,
    /// Interleave short and long records 3:1 by token count.
    #[arg(long)]
    pub mix: bool,
    /// Shuffle each length bucket with the seed before mixing.
    #[arg(long, requires = "mix")]
    pub shuffle: bool,
}

#[derive(Debug, Args)]
pub struct CleanDocstringsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output corpus; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MIN_WORDS)]
    pub min_words: usize,
}

fn prepare(path: &Path, line: usize, text: &str, args: &BuildDatasetArgs, seed: u64) -> Result<PairRecord, Malformed> {
    let bad = |e: &dyn std::fmt::Display| Malformed::new(path, line, e);
    let mut r = parse_record_line(text, line).map_err(|e| Malformed::dataset(path, line, e))?;
    let f = r.assembly().map_err(|e| bad(&e))?;
    if args.strip_comments {
        r.source = strip_source_comments(&r.source).map_err(|e| bad(&format!("record `{}`: {e}", r.id)))?;
    }
    if args.clean_docstrings {
        r.source.docstring = r.source.docstring.as_deref().and_then(|d| clean_docstring(d, args.min_words));
    }
    if args.assign_profiles {
        r.profile = assign_profile(seed, &r.id);
    }
    if args.inline_heuristic {
        r.inline_flag |= has_inlined_callees_heuristic(&f);
    }
    Ok(r)
}

fn check_unique(seen: &mut HashSet<String>, path: &Path, line: usize, id: &str) -> Result<(), Malformed> {
    if !seen.insert(id.to_string()) {
        return Err(Malformed::new(path, line, format!("duplicate record id `{id}`")));
    }
    Ok(())
}

pub fn build_dataset(args: &BuildDatasetArgs, g: &GlobalOpts, pool: &ThreadPool) -> anyhow::Result<()> {
    let mut out = output(Some(&args.out))?;
    let mut report = FilterReport::default();
    let mut seen = HashSet::new();
    let mut held: Vec<(PairRecord, usize)> = Vec::new();

    for chunk in LineChunks::new(&args.input, CHUNK)? {
        let chunk = chunk?;
        let prepared = workers::map(pool, &chunk, |(line, text)| prepare(&args.input, *line, text, args, g.seed));
        let mut records = Vec::with_capacity(prepared.len());
        for ((line, _), r) in chunk.iter().zip(prepared) {
            let r = r?;
            check_unique(&mut seen, &args.input, *line, &r.id)?;
            records.push(r);
        }
        let (kept, rep) = filter_pairs(records, args.min_body_lines);
        report += rep;
        if args.mix {
            let sizes = workers::map(pool, &kept, |r| r.token_count().expect("assembly parsed above"));
            held.extend(kept.into_iter().zip(sizes));
        } else {
            for r in &kept {
                write_json_line(&mut out, r)?;
            }
        }
    }
    if args.mix {
        let config = MixConfig { shuffle: args.shuffle, ..Default::default() };
        let before = held.len();
        let mixed = mix_by_length(held, &config, g.seed);
        eprintln!("build-dataset: mixed {before} filtered records into {}", mixed.len());
        for r in &mixed {
            write_json_line(&mut out, r)?;
        }
    }
    out.flush()?;
    eprintln!(
        "build-dataset: {} in, {} out ({} inline, {} short)",
        report.input, report.output, report.dropped_inline, report.dropped_short
    );
    let mut stdout = output(None)?;
    write_json_line(&mut stdout, &report)?;
    stdout.flush()?;
    Ok(())
}

pub fn clean_docstrings(args: &CleanDocstringsArgs, pool: &ThreadPool) -> anyhow::Result<()> {
    let mut out = output(args.out.as_deref())?;
    let (mut total, mut removed) = (0usize, 0usize);
    for chunk in LineChunks::new(&args.input, CHUNK)? {
        let chunk = chunk?;
        let cleaned = workers::map(pool, &chunk, |(line, text)| {
            let mut r = parse_record_line(text, *line).map_err(|e| Malformed::dataset(&args.input, *line, e))?;
            let had = r.source.docstring.is_some();
            r.source.docstring = r.source.docstring.as_deref().and_then(|d| clean_docstring(d, args.min_words));
            let dropped = had && r.source.docstring.is_none();
            Ok::<_, Malformed>((r, dropped))
        });
        for c in cleaned {
            let (r, dropped) = c?;
            total += 1;
            removed += usize::from(dropped);
            write_json_line(&mut out, &r)?;
        }
    }
    out.flush()?;
    eprintln!("clean-docstrings: {total} records, {removed} docstrings removed as too short");
    Ok(())
}

pub fn parse_check(path: &Path, pool: &ThreadPool) -> anyhow::Result<()> {
    let (mut total, mut first_bad) = (0usize, None);
    let mut bad = 0usize;
    let mut seen = HashSet::new();
    for chunk in LineChunks::new(path, CHUNK)? {
        let chunk = chunk?;
        let checked = workers::map(pool, &chunk, |(line, text)| {
            let r = parse_record_line(text, *line).map_err(|e| Malformed::dataset(path, *line, e))?;
            r.assembly().map_err(|e| Malformed::new(path, *line, e))?;
            Ok::<_, Malformed>(r.id)
        });
        for ((line, _), c) in chunk.iter().zip(checked) {
            total += 1;
            let c = c.and_then(|id| check_unique(&mut seen, path, *line, &id));
            if let Err(e) = c {
                eprintln!("{e}");
                bad += 1;
                first_bad.get_or_insert(e);
            }
        }
    }
    println!("{total} records, {bad} malformed");
    match first_bad {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}
