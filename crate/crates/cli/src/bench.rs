// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::anyhow;
use clap::Args;
use npn::canonical::canonicalize_with;
use npn::{CanonConfig, Method, StageCounters, TruthTable, VectorKind};
use rayon::prelude::*;

use crate::input::{read_table_file, write_output};
use crate::{thread_pool, CmdResult, Failure};

pub const BENCH_VERSION: &str = "# npn-bench v1";

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Truth-table file, `-` for stdin.
    pub file: PathBuf,
    /// Methods to compare, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "inf,inf-plus,baseline")]
    pub methods: Vec<Method>,
    #[arg(long)]
    pub inputs: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub sers_base: u32,
    #[arg(long, default_value_t = 6)]
    pub exhaustive_cap: usize,
    #[arg(long)]
    pub max_enumerations: Option<u128>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Row {
    method: Method,
    seconds: f64,
    classes: usize,
    counters: StageCounters,
    /// Per function: class label (first-seen order) and final enumerations.
    labels: Vec<u32>,
    enums: Vec<u128>,
}

fn run_method(tables: &[TruthTable], m: Method, cfg: &CanonConfig) -> Result<Row, Failure> {
    let start = Instant::now();
    let results: Vec<_> = tables
        .par_iter()
        .map(|f| canonicalize_with(f, m, cfg).map(|r| (r.canonical, r.counters)))
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Input(anyhow!("{m}: {e}")))?;
    let seconds = start.elapsed().as_secs_f64();
    let mut ids: HashMap<(usize, TruthTable), u32> = HashMap::new();
    let mut counters = StageCounters::default();
    let mut labels = Vec::with_capacity(tables.len());
    let mut enums = Vec::with_capacity(tables.len());
    for (c, k) in results {
        counters += k;
        enums.push(k.final_enumerations);
        let next = ids.len() as u32;
        labels.push(*ids.entry((c.num_inputs(), c)).or_insert(next));
    }
    Ok(Row {
        method: m,
        seconds,
        classes: ids.len(),
        counters,
        labels,
        enums,
    })
}

pub fn run(a: BenchArgs) -> CmdResult {
    if a.sers_base < 2 {
        return Err(anyhow!("--sers-base must be at least 2").into());
    }
    if a.methods.is_empty() {
        return Err(anyhow!("--methods is empty").into());
    }
    let pool = thread_pool(a.jobs)?;
    let cfg = CanonConfig {
        sers_base: a.sers_base,
        exhaustive_cap: a.exhaustive_cap,
        exhaustive_vector: VectorKind::Hybrid,
        max_enumerations: a.max_enumerations,
    };
    let (items, _) = read_table_file(&a.file, a.inputs)?;
    let tables: Vec<TruthTable> = items.into_iter().map(|i| i.table).collect();

    let mut rows = Vec::new();
    for &m in &a.methods {
        rows.push(pool.install(|| run_method(&tables, m, &cfg))?);
    }

    let mut out = String::from(BENCH_VERSION);
    out.push_str("\nmethod,functions,classes,seconds");
    for (k, _) in StageCounters::default().fields() {
        let _ = write!(out, ",{k}");
    }
    out.push('\n');
    for r in &rows {
        let _ = write!(out, "{},{},{},{:.6}", r.method, tables.len(), r.classes, r.seconds);
        for (_, v) in r.counters.fields() {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    write_output(a.out.as_deref(), &out)?;

    let find = |m: Method| rows.iter().find(|r| r.method == m);
    if let (Some(inf), Some(base)) = (find(Method::Hybrid), find(Method::Baseline)) {
        let ok = inf.enums.iter().zip(&base.enums).filter(|(i, b)| i <= b).count();
        eprintln!("final_enumerations inf <= baseline: {ok}/{}", tables.len());
    }
    if let Some(r) = rows.iter().find(|r| r.labels != rows[0].labels) {
        return Err(Failure::Invariant(anyhow!(
            "{} and {} partition the corpus differently ({} vs {} classes)",
            rows[0].method,
            r.method,
            rows[0].classes,
            r.classes
        )));
    }
    Ok(())
}
