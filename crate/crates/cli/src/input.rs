// SPDX-License-Identifier: Apache-2.0

use std::io::Read;
use std::path::Path;

use anyhow::Context;
use npn::text::{read_tables, Item, LineError};

/// Reads a file, or stdin for `-`.
pub fn read_bytes(path: &Path) -> anyhow::Result<Vec<u8>> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).context("reading stdin")?;
        Ok(buf)
    } else {
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))
    }
}

pub fn read_text(path: &Path) -> anyhow::Result<String> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
}

/// Parses a truth-table file, printing one diagnostic per bad line.
pub fn read_table_file(path: &Path, inputs: Option<usize>) -> anyhow::Result<(Vec<Item>, Vec<LineError>)> {
    let text = read_text(path)?;
    let (items, errors) = read_tables(&text, inputs);
    for e in &errors {
        eprintln!("{}:{}: {}", path.display(), e.line, e.kind);
    }
    Ok((items, errors))
}

/// Writes to `out`, or stdout when absent.
pub fn write_output(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).context("writing stdout")?;
            stdout.flush().context("writing stdout")
        }
    }
}
