// SPDX-License-Identifier: Apache-2.0

//! And-inverter graphs in AIGER format and K-feasible cut extraction.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::truth_table::{TruthTable, Var, MAX_INPUTS};

/// A literal: `2 * node + complemented`.
pub type Lit = u32;

pub const fn lit_node(l: Lit) -> u32 {
    l >> 1
}

pub const fn lit_is_complemented(l: Lit) -> bool {
    l & 1 == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AndGate {
    /// Node index of the gate output.
    pub node: u32,
    pub fanin0: Lit,
    pub fanin1: Lit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Const,
    Input,
    /// Position in [`Aig::ands`].
    And(usize),
    Unused,
}

/// A combinational AIG. Node 0 is constant false; `ands` is topologically
/// ordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aig {
    pub max_var: u32,
    /// Input node indices in declaration order.
    pub inputs: Vec<u32>,
    pub outputs: Vec<Lit>,
    pub ands: Vec<AndGate>,
    kinds: Vec<NodeKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AigErrorKind {
    #[error("bad header {0:?}")]
    BadHeader(String),
    #[error("sequential circuits unsupported ({0} latches)")]
    Latches(u32),
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("header counts inconsistent: M={max_var} < I+L+A={needed}")]
    Counts { max_var: u32, needed: u64 },
    #[error("literal {lit} out of range (max variable {max_var})")]
    LiteralOutOfRange { lit: Lit, max_var: u32 },
    #[error("literal {0} cannot be defined (constant or complemented)")]
    BadDefinition(Lit),
    #[error("variable {0} defined twice")]
    Redefined(u32),
    #[error("literal {0} refers to an undefined variable")]
    Undefined(Lit),
    #[error("cyclic definition through variable {0}")]
    Cycle(u32),
    #[error("truncated binary gate section")]
    Truncated,
    #[error("invalid gate delta")]
    BadDelta,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct AigError {
    /// 1-based; for errors found after parsing, the line of the offending
    /// definition.
    pub line: usize,
    pub kind: AigErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("cut size {0} outside 2..=16")]
    CutSize(usize),
    #[error("cut limit must be at least 1")]
    CutLimit,
    #[error("node {0} is not in the graph")]
    NoSuchNode(u32),
    #[error("cone of node {node} escapes its cut at node {escaped}")]
    ConeEscapes { node: u32, escaped: u32 },
    #[error("cut of {0} leaves exceeds {MAX_INPUTS}")]
    CutTooLarge(usize),
}

struct Header {
    max_var: u32,
    inputs: u32,
    outputs: u32,
    ands: u32,
}

fn parse_header(line: &str, magic: &str) -> Result<Header, AigErrorKind> {
    let bad = || AigErrorKind::BadHeader(line.to_string());
    let mut it = line.split_whitespace();
    if it.next() != Some(magic) {
        return Err(bad());
    }
    let nums: Vec<u32> = it.map(|t| t.parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    // Later AIGER revisions append B C J F; only M I L O A are supported.
    if nums.len() != 5 {
        return Err(bad());
    }
    if nums[2] != 0 {
        return Err(AigErrorKind::Latches(nums[2]));
    }
    let needed = nums[1] as u64 + nums[4] as u64;
    if (nums[0] as u64) < needed {
        return Err(AigErrorKind::Counts {
            max_var: nums[0],
            needed,
        });
    }
    Ok(Header {
        max_var: nums[0],
        inputs: nums[1],
        outputs: nums[3],
        ands: nums[4],
    })
}

fn parse_lits<const K: usize>(line: &str, what: &'static str) -> Result<[Lit; K], AigErrorKind> {
    let mut out = [0; K];
    let mut it = line.split_whitespace();
    for slot in &mut out {
        *slot = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(AigErrorKind::Expected(what))?;
    }
    if it.next().is_some() {
        return Err(AigErrorKind::Expected(what));
    }
    Ok(out)
}

fn err(line: usize, kind: AigErrorKind) -> AigError {
    AigError { line, kind }
}

/// Parses AIGER ASCII (`aag M I L O A`). The symbol table and comments are
/// ignored.
pub fn parse_aag(text: &str) -> Result<Aig, AigError> {
    let end = text.lines().count() + 1;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, head) = lines
        .next()
        .ok_or_else(|| err(1, AigErrorKind::BadHeader(String::new())))?;
    let h = parse_header(head.trim(), "aag").map_err(|k| err(1, k))?;
    let mut next = |what: &'static str| {
        lines
            .next()
            .ok_or_else(|| err(end, AigErrorKind::Expected(what)))
    };

    let mut inputs = Vec::with_capacity(h.inputs as usize);
    let mut input_lines = Vec::with_capacity(h.inputs as usize);
    for _ in 0..h.inputs {
        let (ln, l) = next("input literal")?;
        let [lit] = parse_lits::<1>(l, "input literal").map_err(|k| err(ln, k))?;
        inputs.push(lit);
        input_lines.push(ln);
    }
    let mut outputs = Vec::with_capacity(h.outputs as usize);
    let mut output_lines = Vec::with_capacity(h.outputs as usize);
    for _ in 0..h.outputs {
        let (ln, l) = next("output literal")?;
        let [lit] = parse_lits::<1>(l, "output literal").map_err(|k| err(ln, k))?;
        outputs.push(lit);
        output_lines.push(ln);
    }
    let mut ands = Vec::with_capacity(h.ands as usize);
    let mut and_lines = Vec::with_capacity(h.ands as usize);
    for _ in 0..h.ands {
        let (ln, l) = next("and gate")?;
        let [lhs, a, b] = parse_lits::<3>(l, "and gate").map_err(|k| err(ln, k))?;
        ands.push((lhs, a, b));
        and_lines.push(ln);
    }
    build(h.max_var, &inputs, &input_lines, &outputs, &output_lines, &ands, &and_lines)
}

/// Checks definitions and sorts gates topologically.
fn build(
    max_var: u32,
    inputs: &[Lit],
    input_lines: &[usize],
    outputs: &[Lit],
    output_lines: &[usize],
    ands: &[(Lit, Lit, Lit)],
    and_lines: &[usize],
) -> Result<Aig, AigError> {
    let size = max_var as usize + 1;
    let in_range = |l: Lit, line: usize| {
        if lit_node(l) > max_var {
            Err(err(line, AigErrorKind::LiteralOutOfRange { lit: l, max_var }))
        } else {
            Ok(())
        }
    };
    let mut kinds = vec![NodeKind::Unused; size];
    kinds[0] = NodeKind::Const;
    let mut input_nodes = Vec::with_capacity(inputs.len());
    for (&l, &line) in inputs.iter().zip(input_lines) {
        in_range(l, line)?;
        if l < 2 || lit_is_complemented(l) {
            return Err(err(line, AigErrorKind::BadDefinition(l)));
        }
        let v = lit_node(l);
        if kinds[v as usize] != NodeKind::Unused {
            return Err(err(line, AigErrorKind::Redefined(v)));
        }
        kinds[v as usize] = NodeKind::Input;
        input_nodes.push(v);
    }
    for (i, (&(lhs, a, b), &line)) in ands.iter().zip(and_lines).enumerate() {
        for l in [lhs, a, b] {
            in_range(l, line)?;
        }
        if lhs < 2 || lit_is_complemented(lhs) {
            return Err(err(line, AigErrorKind::BadDefinition(lhs)));
        }
        let v = lit_node(lhs);
        if kinds[v as usize] != NodeKind::Unused {
            return Err(err(line, AigErrorKind::Redefined(v)));
        }
        kinds[v as usize] = NodeKind::And(i);
    }
    let defined = |l: Lit| kinds[lit_node(l) as usize] != NodeKind::Unused;
    for (&(_, a, b), &line) in ands.iter().zip(and_lines) {
        for l in [a, b] {
            if !defined(l) {
                return Err(err(line, AigErrorKind::Undefined(l)));
            }
        }
    }
    for (&l, &line) in outputs.iter().zip(output_lines) {
        in_range(l, line)?;
        if !defined(l) {
            return Err(err(line, AigErrorKind::Undefined(l)));
        }
    }

    // Iterative DFS post-order over gates.
    const NEW: u8 = 0;
    const OPEN: u8 = 1;
    const DONE: u8 = 2;
    let mut mark = vec![NEW; ands.len()];
    let mut order = Vec::with_capacity(ands.len());
    for root in 0..ands.len() {
        if mark[root] != NEW {
            continue;
        }
        let mut stack = vec![(root, 0u8)];
        mark[root] = OPEN;
        while let Some(top) = stack.last_mut() {
            let (g, child) = *top;
            if child == 2 {
                mark[g] = DONE;
                order.push(g);
                stack.pop();
                continue;
            }
            top.1 += 1;
            let l = if child == 0 { ands[g].1 } else { ands[g].2 };
            if let NodeKind::And(c) = kinds[lit_node(l) as usize] {
                match mark[c] {
                    NEW => {
                        mark[c] = OPEN;
                        stack.push((c, 0));
                    }
                    OPEN => return Err(err(and_lines[g], AigErrorKind::Cycle(lit_node(ands[c].0)))),
                    _ => {}
                }
            }
        }
    }

    let mut sorted = Vec::with_capacity(ands.len());
    for (pos, &g) in order.iter().enumerate() {
        let (lhs, a, b) = ands[g];
        kinds[lit_node(lhs) as usize] = NodeKind::And(pos);
        sorted.push(AndGate {
            node: lit_node(lhs),
            fanin0: a,
            fanin1: b,
        });
    }
    Ok(Aig {
        max_var,
        inputs: input_nodes,
        outputs: outputs.to_vec(),
        ands: sorted,
        kinds,
    })
}

fn read_varint(bytes: &[u8], pos: &mut usize) -> Result<u32, AigErrorKind> {
    let mut x: u64 = 0;
    let mut shift = 0;
    loop {
        let b = *bytes.get(*pos).ok_or(AigErrorKind::Truncated)?;
        *pos += 1;
        x |= ((b & 0x7f) as u64) << shift;
        if b & 0x80 == 0 {
            break;
        }
        shift += 7;
        if shift > 35 {
            return Err(AigErrorKind::BadDelta);
        }
    }
    u32::try_from(x).map_err(|_| AigErrorKind::BadDelta)
}

/// Parses binary AIGER (`aig M I L O A`): inputs are implicit, gates are
/// delta-encoded.
pub fn parse_aig_binary(bytes: &[u8]) -> Result<Aig, AigError> {
    let mut pos = 0;
    let mut line = 1;
    let next_line = |pos: &mut usize, line: &mut usize| -> Result<String, AigError> {
        let start = *pos;
        let end = bytes[start..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|i| start + i)
            .ok_or_else(|| err(*line, AigErrorKind::Expected("newline")))?;
        *pos = end + 1;
        *line += 1;
        Ok(String::from_utf8_lossy(&bytes[start..end]).into_owned())
    };
    let head = next_line(&mut pos, &mut line)?;
    let h = parse_header(head.trim(), "aig").map_err(|k| err(1, k))?;
    let inputs: Vec<Lit> = (1..=h.inputs).map(|i| 2 * i).collect();
    let input_lines = vec![1; inputs.len()];
    let mut outputs = Vec::new();
    let mut output_lines = Vec::new();
    for _ in 0..h.outputs {
        let ln = line;
        let l = next_line(&mut pos, &mut line)?;
        let [lit] = parse_lits::<1>(&l, "output literal").map_err(|k| err(ln, k))?;
        outputs.push(lit);
        output_lines.push(ln);
    }
    let mut ands = Vec::with_capacity(h.ands as usize);
    for i in 0..h.ands {
        let lhs = 2 * (h.inputs + 1 + i);
        let d0 = read_varint(bytes, &mut pos).map_err(|k| err(line, k))?;
        let d1 = read_varint(bytes, &mut pos).map_err(|k| err(line, k))?;
        let a = lhs.checked_sub(d0).ok_or_else(|| err(line, AigErrorKind::BadDelta))?;
        let b = a.checked_sub(d1).ok_or_else(|| err(line, AigErrorKind::BadDelta))?;
        ands.push((lhs, a, b));
    }
    let and_lines = vec![line; ands.len()];
    build(h.max_var, &inputs, &input_lines, &outputs, &output_lines, &ands, &and_lines)
}

/// Parses either AIGER flavour, chosen by the header magic.
pub fn parse_aiger(bytes: &[u8]) -> Result<Aig, AigError> {
    if bytes.starts_with(b"aig ") {
        parse_aig_binary(bytes)
    } else {
        let text = String::from_utf8_lossy(bytes);
        parse_aag(&text)
    }
}

/// Renders AIGER ASCII with gates in topological order.
pub fn print_aag(aig: &Aig) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "aag {} {} 0 {} {}",
        aig.max_var,
        aig.inputs.len(),
        aig.outputs.len(),
        aig.ands.len()
    );
    for &v in &aig.inputs {
        let _ = writeln!(out, "{}", 2 * v);
    }
    for &l in &aig.outputs {
        let _ = writeln!(out, "{l}");
    }
    for g in &aig.ands {
        let _ = writeln!(out, "{} {} {}", 2 * g.node, g.fanin0, g.fanin1);
    }
    out
}

impl Aig {
    pub fn kind(&self, node: u32) -> NodeKind {
        self.kinds.get(node as usize).copied().unwrap_or(NodeKind::Unused)
    }

    pub fn gate(&self, node: u32) -> Option<&AndGate> {
        match self.kind(node) {
            NodeKind::And(i) => Some(&self.ands[i]),
            _ => None,
        }
    }

    /// Inputs in declaration order, then gates.
    pub fn topological_order(&self) -> Vec<u32> {
        self.inputs
            .iter()
            .copied()
            .chain(self.ands.iter().map(|g| g.node))
            .collect()
    }
}

/// Incremental construction with fresh node indices.
#[derive(Debug, Clone, Default)]
pub struct AigBuilder {
    next: u32,
    inputs: Vec<Lit>,
    outputs: Vec<Lit>,
    ands: Vec<(Lit, Lit, Lit)>,
}

impl AigBuilder {
    pub fn new() -> Self {
        AigBuilder {
            next: 1,
            ..Default::default()
        }
    }

    pub fn input(&mut self) -> Lit {
        let l = 2 * self.next;
        self.next += 1;
        self.inputs.push(l);
        l
    }

    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        let l = 2 * self.next;
        self.next += 1;
        self.ands.push((l, a, b));
        l
    }

    pub fn output(&mut self, l: Lit) {
        self.outputs.push(l);
    }

    /// Panics on literals that were not handed out by this builder.
    pub fn finish(self) -> Aig {
        let lines = |k| vec![0; k];
        build(
            self.next - 1,
            &self.inputs,
            &lines(self.inputs.len()),
            &self.outputs,
            &lines(self.outputs.len()),
            &self.ands,
            &lines(self.ands.len()),
        )
        .expect("builder literals are valid")
    }
}

/// Sorted, distinct leaf nodes.
pub type Cut = Vec<u32>;

/// Default largest cut.
pub const DEFAULT_CUT_SIZE: usize = 8;
/// Default cuts kept per node, trivial cut included.
pub const DEFAULT_CUT_LIMIT: usize = 64;

/// Cut sets indexed by node. `cuts[node]` is empty for unused indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutSets {
    pub cuts: Vec<Vec<Cut>>,
}

impl CutSets {
    pub fn of(&self, node: u32) -> &[Cut] {
        self.cuts.get(node as usize).map_or(&[], Vec::as_slice)
    }
}

fn check_params(k: usize, limit: usize) -> Result<(), IngestError> {
    if !(2..=MAX_INPUTS).contains(&k) {
        return Err(IngestError::CutSize(k));
    }
    if limit == 0 {
        return Err(IngestError::CutLimit);
    }
    Ok(())
}

fn merge_cuts(a: &[u32], b: &[u32], k: usize) -> Option<Cut> {
    let mut out = Vec::with_capacity(k);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (_, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if out.len() == k {
            return None;
        }
        out.push(next);
    }
    Some(out)
}

fn is_subset(small: &[u32], big: &[u32]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}

fn priority(a: &Cut, b: &Cut) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Enumerates K-feasible cuts bottom-up.
///
/// The constant node has the empty cut and each input its trivial cut.
/// A gate's cuts are the pairwise unions of its fanins' cuts with at most `k`
/// leaves, plus the trivial cut, minus those that strictly contain another.
/// At most `limit` are kept, smallest first. The trivial cut is always kept
/// unless the gate is constant.
pub fn enumerate_cuts(aig: &Aig, k: usize, limit: usize) -> Result<CutSets, IngestError> {
    check_params(k, limit)?;
    let mut cuts: Vec<Vec<Cut>> = vec![Vec::new(); aig.max_var as usize + 1];
    cuts[0] = vec![Vec::new()];
    for &v in &aig.inputs {
        cuts[v as usize] = vec![vec![v]];
    }
    for g in &aig.ands {
        let (a, b) = (lit_node(g.fanin0) as usize, lit_node(g.fanin1) as usize);
        let mut merged: BTreeSet<Cut> = BTreeSet::new();
        for ca in &cuts[a] {
            for cb in &cuts[b] {
                if let Some(u) = merge_cuts(ca, cb, k) {
                    merged.insert(u);
                }
            }
        }
        let mut kept: Vec<Cut> = merged.into_iter().collect();
        kept.sort_by(priority);
        let mut filtered: Vec<Cut> = Vec::with_capacity(kept.len());
        for c in kept {
            // Sorted by size, so only earlier cuts can be strict subsets.
            if !filtered.iter().any(|s| s.len() < c.len() && is_subset(s, &c)) {
                filtered.push(c);
            }
        }
        // A constant gate has the empty cut, which dominates the trivial one.
        if filtered.first().is_some_and(Vec::is_empty) {
            filtered.truncate(1);
        } else {
            filtered.truncate(limit - 1);
            filtered.push(vec![g.node]);
            filtered.sort_by(priority);
        }
        cuts[g.node as usize] = filtered;
    }
    Ok(CutSets { cuts })
}

/// Function of `node` over `cut`, leaf `i` (ascending node order) being `x_{i+1}`.
pub fn cut_truth_table(aig: &Aig, node: u32, cut: &[u32]) -> Result<TruthTable, IngestError> {
    if aig.kind(node) == NodeKind::Unused {
        return Err(IngestError::NoSuchNode(node));
    }
    let mut leaves = cut.to_vec();
    leaves.sort_unstable();
    leaves.dedup();
    let n = leaves.len();
    if n > MAX_INPUTS {
        return Err(IngestError::CutTooLarge(n));
    }

    // Collect the cone above the leaves.
    let mut cone: Vec<usize> = Vec::new();
    let mut seen: HashSet<u32> = HashSet::new();
    let mut stack = vec![node];
    while let Some(v) = stack.pop() {
        if leaves.binary_search(&v).is_ok() || !seen.insert(v) {
            continue;
        }
        match aig.kind(v) {
            NodeKind::Const => {}
            NodeKind::And(i) => {
                cone.push(i);
                stack.push(lit_node(aig.ands[i].fanin0));
                stack.push(lit_node(aig.ands[i].fanin1));
            }
            _ => return Err(IngestError::ConeEscapes { node, escaped: v }),
        }
    }
    cone.sort_unstable();

    let mut value: std::collections::HashMap<u32, TruthTable> = leaves
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, TruthTable::var(n, Var::new(i))))
        .collect();
    value.entry(0).or_insert_with(|| TruthTable::zero(n));
    let fetch = |value: &std::collections::HashMap<u32, TruthTable>, l: Lit| {
        let t = &value[&lit_node(l)];
        if lit_is_complemented(l) {
            !t.clone()
        } else {
            t.clone()
        }
    };
    for i in cone {
        let g = &aig.ands[i];
        let t = &fetch(&value, g.fanin0) & &fetch(&value, g.fanin1);
        value.insert(g.node, t);
    }
    Ok(value.remove(&node).expect("root evaluated"))
}

/// Truth tables of every cut with `2..=k` leaves, gates in topological order.
/// With `dedupe`, only the first copy of each table is kept.
pub fn extract_functions(aig: &Aig, k: usize, limit: usize, dedupe: bool) -> Result<Vec<TruthTable>, IngestError> {
    let sets = enumerate_cuts(aig, k, limit)?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for g in &aig.ands {
        for cut in sets.of(g.node) {
            if cut.len() < 2 {
                continue;
            }
            let t = cut_truth_table(aig, g.node, cut)?;
            if !dedupe || seen.insert(t.clone()) {
                out.push(t);
            }
        }
    }
    Ok(out)
}
