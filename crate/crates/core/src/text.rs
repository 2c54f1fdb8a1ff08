// SPDX-License-Identifier: Apache-2.0

//! Line-oriented truth-table files.
//!
//! One table per line in the hex format of [`TruthTable::parse_hex`], with an
//! optional `0x` prefix and anything after the first whitespace ignored.
//! Blank lines and lines starting with `#` are skipped, except the sentinel
//! `# n=<k>`, which fixes the input count of the lines after it. Without a
//! sentinel the count is inferred from the digit count.

use std::fmt::Write as _;

use thiserror::Error;

use crate::truth_table::{ParseTableError, TruthTable, MAX_INPUTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineErrorKind {
    #[error(transparent)]
    Table(#[from] ParseTableError),
    #[error("bad arity sentinel {0:?}")]
    Sentinel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct LineError {
    /// 1-based.
    pub line: usize,
    pub kind: LineErrorKind,
}

/// A parsed table and the 1-based line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub line: usize,
    pub table: TruthTable,
}

fn sentinel(comment: &str) -> Option<Result<Option<usize>, LineErrorKind>> {
    let rest = comment.trim_start_matches('#').trim();
    let value = rest.strip_prefix("n=")?.trim();
    if value == "auto" {
        return Some(Ok(None));
    }
    Some(match value.parse::<usize>() {
        Ok(k) if k <= MAX_INPUTS => Ok(Some(k)),
        _ => Err(LineErrorKind::Sentinel(comment.to_string())),
    })
}

/// Parses every line, keeping going past bad ones. `inputs` is the input
/// count in force before the first sentinel.
pub fn read_tables(text: &str, inputs: Option<usize>) -> (Vec<Item>, Vec<LineError>) {
    let mut items = Vec::new();
    let mut errors = Vec::new();
    let mut arity = inputs;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() {
            continue;
        }
        if s.starts_with('#') {
            match sentinel(s) {
                Some(Ok(k)) => arity = k,
                Some(Err(kind)) => errors.push(LineError { line, kind }),
                None => {}
            }
            continue;
        }
        let token = s.split(|c: char| c.is_whitespace() || c == ',').next().unwrap_or(s);
        match TruthTable::parse_hex(token, arity) {
            Ok(table) => items.push(Item { line, table }),
            Err(e) => errors.push(LineError { line, kind: e.into() }),
        }
    }
    (items, errors)
}

/// Renders tables one per line, writing `# n=<k>` before the first table and
/// whenever the input count changes.
pub fn write_tables<'a>(tables: impl IntoIterator<Item = &'a TruthTable>) -> String {
    let mut out = String::new();
    let mut last = None;
    for t in tables {
        if last != Some(t.num_inputs()) {
            let _ = writeln!(out, "# n={}", t.num_inputs());
            last = Some(t.num_inputs());
        }
        let _ = writeln!(out, "{}", t.to_hex());
    }
    out
}
