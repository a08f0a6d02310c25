//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain strings and numbers and returns a JSON string,
//! so the page needs no generated TypeScript types.

use asmsearch::asm::{parse_assembly, tokenize, AssemblyFunction};
use asmsearch::contrastive::{infonce_loss_with, EmbeddingMatrix, InfoNceConfig, Similarity};
use asmsearch::emu::{equivalence_catalog, prf, runtime_similarity, ExecutionTrace};
use asmsearch::metrics::score_all;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn parse(label: &str, text: &str) -> Result<AssemblyFunction, String> {
    parse_assembly(text).map_err(|e| format!("{label}: {e}"))
}

/// BLEU, ROUGE-L and METEOR of `candidate` against `reference`, both
/// Intel-syntax listings.
pub fn sequence_scores(candidate: &str, reference: &str) -> Result<Value, String> {
    let c = tokenize(&parse("candidate", candidate)?);
    let r = tokenize(&parse("reference", reference)?);
    let s = score_all(&c, &r).map_err(|e| e.to_string())?;
    Ok(json!({
        "bleu": s.bleu,
        "rouge_l": s.rouge_l,
        "meteor": s.meteor,
        "candidate_tokens": c,
        "reference_tokens": r,
    }))
}

fn trace_json(t: &ExecutionTrace) -> Value {
    json!({
        "rax": format!("{:#x}", t.final_rax),
        "rsp": format!("{:#x}", t.final_rsp),
        "rbp": format!("{:#x}", t.final_rbp),
        "executed": t.executed_count,
        "halt": t.halt_reason.as_str(),
        "events": t.events.iter().map(|e| json!({
            "kind": e.kind,
            "address": format!("{:#x}", e.address),
            "size": e.size,
            "value": format!("{:#x}", e.value),
        })).collect::<Vec<_>>(),
    })
}

/// Runtime similarity of two listings under `seeds` consecutive seeds
/// starting at `first_seed`, with both traces of the first seed.
pub fn runtime_scores(a: &str, b: &str, first_seed: u64, seeds: u32, max_instructions: usize) -> Result<Value, String> {
    let fa = parse("first listing", a)?;
    let fb = parse("second listing", b)?;
    let seeds = seeds.clamp(1, 64) as u64;
    let mut per_seed = Vec::new();
    let mut shown = None;
    for seed in first_seed..first_seed.saturating_add(seeds) {
        let (score, ta, tb) = runtime_similarity(&fa, &fb, seed, max_instructions);
        per_seed.push(json!({ "seed": seed, "score": score }));
        shown.get_or_insert_with(|| (trace_json(&ta), trace_json(&tb)));
    }
    let mean = per_seed.iter().map(|s| s["score"]["value"].as_f64().unwrap_or(0.0)).sum::<f64>() / seeds as f64;
    let (ta, tb) = shown.unwrap_or_default();
    Ok(json!({ "mean": mean, "per_seed": per_seed, "trace_a": ta, "trace_b": tb }))
}

/// Deterministic batch: entries in `[-1, 1]` from the emulator's PRF, with
/// each asm row pulled towards its text row by `alignment` in `[0, 1]`.
fn batch(n: usize, d: usize, alignment: f64, seed: u64) -> (EmbeddingMatrix, EmbeddingMatrix) {
    let u = |i: u64| (prf(seed, i) >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
    let t: Vec<Vec<f64>> = (0..n).map(|i| (0..d).map(|k| u((i * d + k) as u64)).collect()).collect();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..d)
                .map(|k| alignment * t[i][k] + (1.0 - alignment) * u((1 << 32) + (i * d + k) as u64))
                .collect()
        })
        .collect();
    (EmbeddingMatrix::from_rows(&t).unwrap(), EmbeddingMatrix::from_rows(&a).unwrap())
}

/// InfoNCE loss of a synthetic `n x d` batch at `steps` temperatures spaced
/// log-uniformly over `[t_min, t_max]`.
pub fn temperature_sweep(
    n: usize,
    d: usize,
    alignment: f64,
    cosine: bool,
    t_min: f64,
    t_max: f64,
    steps: usize,
) -> Result<Value, String> {
    if !(1..=256).contains(&n) || !(1..=256).contains(&d) {
        return Err("batch size and dimension must be between 1 and 256".into());
    }
    if !(t_min > 0.0 && t_max >= t_min && t_max.is_finite()) || !(2..=200).contains(&steps) {
        return Err("need 0 < t_min <= t_max and 2 to 200 steps".into());
    }
    let (texts, asms) = batch(n, d, alignment.clamp(0.0, 1.0), 0x5eed);
    let similarity = if cosine { Similarity::Cosine } else { Similarity::Dot };
    let ratio = (t_max / t_min).ln();
    let points = (0..steps)
        .map(|i| {
            let temperature = t_min * (ratio * i as f64 / (steps - 1) as f64).exp();
            let r = infonce_loss_with(&texts, &asms, &InfoNceConfig { temperature, similarity })
                .map_err(|e| e.to_string())?;
            Ok(json!({ "temperature": temperature, "l1": r.l1, "l2": r.l2, "total": r.total }))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(json!({ "log_n": (n as f64).ln(), "points": points }))
}

fn into_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn compare_sequences(candidate: &str, reference: &str) -> Result<String, JsError> {
    into_js(sequence_scores(candidate, reference))
}

#[wasm_bindgen]
pub fn compare_runtime(a: &str, b: &str, first_seed: u32, seeds: u32, max_instructions: u32) -> Result<String, JsError> {
    into_js(runtime_scores(a, b, first_seed as u64, seeds, max_instructions as usize))
}

#[wasm_bindgen]
pub fn infonce_temperature_sweep(
    n: u32,
    d: u32,
    alignment: f64,
    cosine: bool,
    t_min: f64,
    t_max: f64,
    steps: u32,
) -> Result<String, JsError> {
    into_js(temperature_sweep(n as usize, d as usize, alignment, cosine, t_min, t_max, steps as usize))
}

/// The built-in equivalence catalog, used as presets on the page.
#[wasm_bindgen]
pub fn catalog_pairs() -> String {
    let pairs = equivalence_catalog()
        .iter()
        .map(|p| json!({ "name": p.name, "original": p.original, "equivalent": p.equivalent, "mutant": p.mutant }));
    Value::Array(pairs.collect()).to_string()
}
