// SPDX-License-Identifier: Apache-2.0

//! `npn`: canonical forms, classification, cut extraction and self-checks.

mod bench;
mod canon;
mod classify;
mod cuts;
mod input;
mod verify;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use npn::{CanonConfig, Method, VectorKind};

/// Exit status classes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or unreadable input: exit 1.
    Input(anyhow::Error),
    /// A checked invariant did not hold: exit 2.
    Invariant(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

pub type CmdResult = Result<(), Failure>;

#[derive(Parser, Debug)]
#[command(name = "npn", version, about = "Exact NPN classification of Boolean functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical form of each function in a file, or of hex literals.
    Canon(canon::CanonArgs),
    /// Bucket a truth-table file into NPN classes.
    Classify(classify::ClassifyArgs),
    /// Extract K-cut truth tables from an AIGER circuit.
    Cuts(cuts::CutsArgs),
    /// Check invariants against the brute-force oracle.
    Verify(verify::VerifyArgs),
    /// Compare methods on one corpus.
    Bench(bench::BenchArgs),
}

/// Options shared by the canonicalizing subcommands.
#[derive(Args, Debug, Clone)]
pub struct CanonOpts {
    /// exhaustive, inf, inf-plus or baseline.
    #[arg(long, default_value = "inf-plus")]
    pub method: Method,
    /// Input count of every function; inferred from the digit count if absent.
    #[arg(long)]
    pub inputs: Option<usize>,
    /// Base of the shifted-cofactor signatures.
    #[arg(long, default_value_t = 3)]
    pub sers_base: u32,
    /// Largest input count the exhaustive method accepts.
    #[arg(long, default_value_t = 6)]
    pub exhaustive_cap: usize,
    /// Skip functions whose final enumeration would exceed this many transforms.
    #[arg(long)]
    pub max_enumerations: Option<u128>,
}

impl CanonOpts {
    pub fn validate(&self) -> Result<CanonConfig, Failure> {
        if self.sers_base < 2 {
            return Err(anyhow::anyhow!("--sers-base must be at least 2").into());
        }
        if let Some(n) = self.inputs {
            if !(1..=npn::MAX_INPUTS).contains(&n) {
                return Err(anyhow::anyhow!("--inputs must be in 1..={}", npn::MAX_INPUTS).into());
            }
        }
        Ok(CanonConfig {
            sers_base: self.sers_base,
            exhaustive_cap: self.exhaustive_cap,
            exhaustive_vector: VectorKind::Hybrid,
            max_enumerations: self.max_enumerations,
        })
    }
}

pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, Failure> {
    if jobs == 0 {
        return Err(anyhow::anyhow!("--jobs must be at least 1").into());
    }
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Canon(a) => canon::run(a),
        Command::Classify(a) => classify::run(a),
        Command::Cuts(a) => cuts::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Bench(a) => bench::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(e)) => {
            eprintln!("invariant violated: {e:#}");
            ExitCode::from(2)
        }
    }
}
