// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use npn::classify::{classify_partitioned, CSV_HEADER, CSV_VERSION};
use npn::{ClassMap, Method, RunStats, TruthTable};
use serde_json::json;

use crate::input::{read_table_file, write_output};
use crate::{thread_pool, CanonOpts, CmdResult};

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Truth-table file, `-` for stdin.
    pub file: PathBuf,
    #[command(flatten)]
    pub opts: CanonOpts,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Class CSV destination; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Stats as JSON lines, one per input count plus a total.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Print aggregate stage counters and the grouping histogram.
    #[arg(long)]
    pub stats: bool,
}

/// Classification of a whole corpus, one part per input count.
pub struct Outcome {
    pub parts: BTreeMap<usize, (ClassMap, RunStats)>,
    pub total: RunStats,
}

pub fn classify_items(tables: &[TruthTable], method: Method, config: &npn::CanonConfig, jobs: usize) -> Result<Outcome, crate::Failure> {
    let pool = thread_pool(jobs)?;
    let parts = pool.install(|| classify_partitioned(tables, method, config));
    let mut total = RunStats::default();
    for (_, s) in parts.values() {
        total.absorb(s.clone());
    }
    total.errors.sort_by_key(|e| e.index);
    Ok(Outcome { parts, total })
}

pub fn csv(parts: &BTreeMap<usize, (ClassMap, RunStats)>) -> String {
    let mut out = format!("{CSV_VERSION}\n{CSV_HEADER}\n");
    for (map, _) in parts.values() {
        out.push_str(&map.csv_rows());
    }
    out
}

fn counters_json(s: &RunStats) -> serde_json::Value {
    let mut m = serde_json::Map::new();
    for (k, v) in s.counters.fields() {
        m.insert(k.into(), json!(v.to_string()));
    }
    serde_json::Value::Object(m)
}

fn stats_json(inputs: Option<usize>, s: &RunStats) -> serde_json::Value {
    let hist: serde_json::Map<String, serde_json::Value> =
        s.grouping_histogram.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    json!({
        "inputs": inputs,
        "functions": s.functions,
        "classes": s.classes,
        "errors": s.errors.len(),
        "seconds": s.canonicalize_time.as_secs_f64(),
        "counters": counters_json(s),
        "grouping_histogram": hist,
    })
}

pub fn run(a: ClassifyArgs) -> CmdResult {
    let config = a.opts.validate()?;
    thread_pool(a.jobs)?;
    let (items, parse_errors) = read_table_file(&a.file, a.opts.inputs)?;
    let tables: Vec<TruthTable> = items.iter().map(|i| i.table.clone()).collect();
    let outcome = classify_items(&tables, a.opts.method, &config, a.jobs)?;
    for e in &outcome.total.errors {
        eprintln!("{}:{}: {}", a.file.display(), items[e.index].line, e.error);
    }
    write_output(a.out.as_deref(), &csv(&outcome.parts))?;

    let t = &outcome.total;
    eprintln!("#Funcs {}", t.functions);
    eprintln!("#Classes {}", t.classes);
    eprintln!("Runtime {:.3}s", t.canonicalize_time.as_secs_f64());
    if !parse_errors.is_empty() || !t.errors.is_empty() {
        eprintln!("#Skipped {}", parse_errors.len() + t.errors.len());
    }
    if a.stats {
        for (k, v) in t.counters.fields() {
            eprintln!("{k} {v}");
        }
        let hist: Vec<String> = t.grouping_histogram.iter().map(|(k, v)| format!("var-{k}:{v}")).collect();
        eprintln!("groups {}", hist.join(" "));
    }
    if let Some(p) = &a.report {
        let mut lines = String::new();
        for (n, (_, s)) in &outcome.parts {
            lines.push_str(&stats_json(Some(*n), s).to_string());
            lines.push('\n');
        }
        lines.push_str(&stats_json(None, t).to_string());
        lines.push('\n');
        std::fs::write(p, lines).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}
