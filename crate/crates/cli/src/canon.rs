// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::Args;
use npn::{canonicalize_with, TruthTable};

use crate::input::{read_table_file, write_output};
use crate::{CanonOpts, CmdResult, Failure};

#[derive(Args, Debug)]
pub struct CanonArgs {
    /// Truth-table files or hex literals; an existing path is read as a file.
    #[arg(required = true, value_name = "FILE_OR_HEX")]
    pub functions: Vec<String>,
    #[command(flatten)]
    pub opts: CanonOpts,
    /// Append stage counters to each line.
    #[arg(long)]
    pub stats: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(a: CanonArgs) -> CmdResult {
    let config = a.opts.validate()?;
    let mut tables: Vec<TruthTable> = Vec::new();
    let mut bad = 0;
    for arg in &a.functions {
        let path = Path::new(arg);
        if path.exists() || arg == "-" {
            let (items, errors) = read_table_file(path, a.opts.inputs)?;
            bad += errors.len();
            tables.extend(items.into_iter().map(|i| i.table));
        } else {
            match TruthTable::parse_hex(arg, a.opts.inputs) {
                Ok(t) => tables.push(t),
                Err(e) => {
                    eprintln!("{arg}: {e}");
                    bad += 1;
                }
            }
        }
    }

    let mut out = String::new();
    for (i, f) in tables.iter().enumerate() {
        let r = canonicalize_with(f, a.opts.method, &config)
            .map_err(|e| Failure::Input(anyhow!("function {}: {e}", i + 1)))?;
        if f.apply(&r.witness).ok().as_ref() != Some(&r.canonical) {
            return Err(Failure::Invariant(anyhow!("witness for {f} does not reproduce {}", r.canonical)));
        }
        let w = &r.witness;
        let _ = write!(
            out,
            "{} {} {} {} {}",
            f.to_hex(),
            r.canonical.to_hex(),
            u8::from(w.out_neg()),
            w.phase_string(),
            w.perm_string()
        );
        if a.stats {
            for (k, v) in r.counters.fields() {
                let _ = write!(out, " {k}={v}");
            }
            let _ = write!(
                out,
                " remaining_after_sym={} remaining_after_inf={}",
                r.counters.remaining_after_sym(),
                r.counters.remaining_after_inf()
            );
        }
        out.push('\n');
    }
    write_output(a.out.as_deref(), &out)?;
    if bad > 0 {
        return Err(anyhow!("{bad} malformed input(s)").into());
    }
    Ok(())
}
