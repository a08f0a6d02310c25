use std::collections::BTreeSet;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::PairRecord;
use crate::asm::AssemblyFunction;

pub const DEFAULT_MIN_BODY_LINES: usize = 5;

/// Per-reason drop counts. Counters add, so reports from disjoint chunks of
/// a corpus can be merged in any order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input: usize,
    pub output: usize,
    pub dropped_inline: usize,
    pub dropped_short: usize,
}

impl AddAssign for FilterReport {
    fn add_assign(&mut self, o: FilterReport) {
        self.input += o.input;
        self.output += o.output;
        self.dropped_inline += o.dropped_inline;
        self.dropped_short += o.dropped_short;
    }
}

impl FilterReport {
    pub fn merge(mut self, other: FilterReport) -> FilterReport {
        self += other;
        self
    }
}

/// Drops inline-flagged records, then records whose source body has fewer
/// than `min_body_lines` lines. A record matching both is counted as inline.
pub fn filter_pairs<I>(records: I, min_body_lines: usize) -> (Vec<PairRecord>, FilterReport)
where
    I: IntoIterator<Item = PairRecord>,
{
    let mut report = FilterReport::default();
    let mut kept = Vec::new();
    for r in records {
        report.input += 1;
        if r.inline_flag {
            report.dropped_inline += 1;
        } else if r.source.body_line_count < min_body_lines {
            report.dropped_short += 1;
        } else {
            report.output += 1;
            kept.push(r);
        }
    }
    (kept, report)
}

/// True when the listing defines more than one non-local symbol, which
/// suggests that callee bodies were merged into it.
pub fn has_inlined_callees_heuristic(f: &AssemblyFunction) -> bool {
    let globals: BTreeSet<&str> = f
        .labels
        .keys()
        .map(String::as_str)
        .chain(std::iter::once(f.name.as_str()))
        .filter(|l| !l.is_empty() && !l.starts_with('.'))
        .collect();
    globals.len() > 1
}
