// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use anyhow::anyhow;
use clap::Args;
use npn::ingest::{extract_functions, parse_aiger, DEFAULT_CUT_LIMIT, DEFAULT_CUT_SIZE};
use npn::text::write_tables;

use crate::input::{read_bytes, write_output};
use crate::CmdResult;

#[derive(Args, Debug)]
pub struct CutsArgs {
    /// AIGER file (ASCII or binary), `-` for stdin.
    pub file: PathBuf,
    /// Largest cut, K.
    #[arg(long, default_value_t = DEFAULT_CUT_SIZE)]
    pub cut_size: usize,
    /// Cuts kept per node.
    #[arg(long, default_value_t = DEFAULT_CUT_LIMIT)]
    pub cut_limit: usize,
    /// Drop repeated tables.
    #[arg(long)]
    pub dedupe: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(a: CutsArgs) -> CmdResult {
    if !(2..=npn::MAX_INPUTS).contains(&a.cut_size) {
        return Err(anyhow!("--cut-size must be in 2..={}", npn::MAX_INPUTS).into());
    }
    if a.cut_limit == 0 {
        return Err(anyhow!("--cut-limit must be at least 1").into());
    }
    let bytes = read_bytes(&a.file)?;
    let aig = parse_aiger(&bytes).map_err(|e| anyhow!("{}:{}: {}", a.file.display(), e.line, e.kind))?;
    let tables = extract_functions(&aig, a.cut_size, a.cut_limit, a.dedupe)?;
    write_output(a.out.as_deref(), &write_tables(&tables))?;
    eprintln!("#Cuts {}", tables.len());
    Ok(())
}
