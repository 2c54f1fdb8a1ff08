// SPDX-License-Identifier: Apache-2.0

//! Bucketing functions into NPN classes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::canonical::{canonicalize_with, variable_groups, CanonConfig, CanonError, Method, StageCounters};
use crate::truth_table::{NpnTransform, TruthTable};

/// Header comment of the class CSV.
pub const CSV_VERSION: &str = "# npn-classes v1";
pub const CSV_HEADER: &str = "canonical_hex,count,representative_hex,out_neg,phase_mask_hex,perm,inputs";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassEntry {
    pub count: u64,
    /// Smallest member seen.
    pub representative: TruthTable,
    /// Maps `representative` to the canonical form.
    pub witness: NpnTransform,
}

/// Canonical form to class entry. Iteration is in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassMap {
    classes: BTreeMap<TruthTable, ClassEntry>,
}

impl ClassMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn get(&self, canonical: &TruthTable) -> Option<&ClassEntry> {
        self.classes.get(canonical)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TruthTable, &ClassEntry)> {
        self.classes.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &TruthTable> {
        self.classes.keys()
    }

    /// Sum of member counts.
    pub fn members(&self) -> u64 {
        self.classes.values().map(|e| e.count).sum()
    }

    pub fn insert(&mut self, canonical: TruthTable, entry: ClassEntry) {
        use std::collections::btree_map::Entry;
        match self.classes.entry(canonical) {
            Entry::Vacant(v) => {
                v.insert(entry);
            }
            Entry::Occupied(mut o) => {
                let e = o.get_mut();
                e.count += entry.count;
                if entry.representative < e.representative {
                    e.representative = entry.representative;
                    e.witness = entry.witness;
                }
            }
        }
    }

    /// Associative and commutative.
    pub fn merge(&mut self, other: ClassMap) {
        if other.len() > self.len() {
            let mine = std::mem::replace(&mut self.classes, other.classes);
            for (k, e) in mine {
                self.insert(k, e);
            }
        } else {
            for (k, e) in other.classes {
                self.insert(k, e);
            }
        }
    }

    /// Rows without the header lines.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for (k, e) in &self.classes {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                k.to_hex(),
                e.count,
                e.representative.to_hex(),
                u8::from(e.witness.out_neg()),
                e.witness.phase_string(),
                e.witness.perm_string(),
                k.num_inputs()
            );
        }
        out
    }

    /// Version line, header and rows.
    pub fn to_csv(&self) -> String {
        format!("{CSV_VERSION}\n{CSV_HEADER}\n{}", self.csv_rows())
    }
}

/// A function that could not be canonicalized.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("item {index}: {error}")]
pub struct ItemError {
    /// Position in the input sequence.
    pub index: usize,
    pub error: CanonError,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    pub functions: u64,
    pub classes: u64,
    pub counters: StageCounters,
    /// Groups by size, summed over functions.
    pub grouping_histogram: BTreeMap<usize, u64>,
    pub errors: Vec<ItemError>,
    /// Wall time of canonicalization and merging.
    pub canonicalize_time: Duration,
}

impl RunStats {
    /// Combines stats of disjoint runs.
    pub fn absorb(&mut self, o: RunStats) {
        self.functions += o.functions;
        self.classes += o.classes;
        self.counters += o.counters;
        for (k, v) in o.grouping_histogram {
            *self.grouping_histogram.entry(k).or_default() += v;
        }
        self.errors.extend(o.errors);
        self.canonicalize_time += o.canonicalize_time;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("mixed input counts {first} and {other}; classify each arity separately")]
pub struct MixedArity {
    pub first: usize,
    pub other: usize,
}

fn add_groups(hist: &mut BTreeMap<usize, u64>, f: &TruthTable, method: Method) {
    for g in variable_groups(f, method != Method::Baseline) {
        *hist.entry(g.len()).or_default() += 1;
    }
}

/// Group-size histogram after the influence stage, or after the cofactor
/// stage for the baseline.
pub fn grouping_histogram(functions: &[TruthTable], method: Method) -> BTreeMap<usize, u64> {
    let mut hist = BTreeMap::new();
    for f in functions {
        add_groups(&mut hist, f, method);
    }
    hist
}

#[derive(Default)]
struct Acc {
    map: ClassMap,
    counters: StageCounters,
    hist: BTreeMap<usize, u64>,
    errors: Vec<ItemError>,
    ok: u64,
}

impl Acc {
    fn join(mut self, o: Acc) -> Acc {
        self.map.merge(o.map);
        self.counters += o.counters;
        for (k, v) in o.hist {
            *self.hist.entry(k).or_default() += v;
        }
        self.errors.extend(o.errors);
        self.ok += o.ok;
        self
    }
}

/// Classifies functions of one input count on the current rayon pool.
///
/// Items that fail are reported in [`RunStats::errors`] and skipped;
/// `functions` in the stats counts the successful ones.
pub fn classify(
    functions: &[TruthTable],
    method: Method,
    config: &CanonConfig,
) -> Result<(ClassMap, RunStats), MixedArity> {
    if let Some(first) = functions.first() {
        if let Some(other) = functions.iter().find(|f| f.num_inputs() != first.num_inputs()) {
            return Err(MixedArity {
                first: first.num_inputs(),
                other: other.num_inputs(),
            });
        }
    }
    Ok(classify_unchecked(functions, method, config))
}

fn classify_unchecked(functions: &[TruthTable], method: Method, config: &CanonConfig) -> (ClassMap, RunStats) {
    let start = Instant::now();
    let acc = functions
        .par_iter()
        .enumerate()
        .fold(Acc::default, |mut acc, (index, f)| {
            match canonicalize_with(f, method, config) {
                Ok(r) => {
                    acc.counters += r.counters;
                    add_groups(&mut acc.hist, f, method);
                    acc.ok += 1;
                    acc.map.insert(
                        r.canonical,
                        ClassEntry {
                            count: 1,
                            representative: f.clone(),
                            witness: r.witness,
                        },
                    );
                }
                Err(error) => acc.errors.push(ItemError { index, error }),
            }
            acc
        })
        .reduce(Acc::default, Acc::join);
    let canonicalize_time = start.elapsed();

    let mut errors = acc.errors;
    errors.sort_by_key(|e| e.index);
    let stats = RunStats {
        functions: acc.ok,
        classes: acc.map.len() as u64,
        counters: acc.counters,
        grouping_histogram: acc.hist,
        errors,
        canonicalize_time,
    };
    (acc.map, stats)
}

/// Splits a mixed corpus by input count and classifies each part. Error
/// indices refer to positions in `functions`.
pub fn classify_partitioned(
    functions: &[TruthTable],
    method: Method,
    config: &CanonConfig,
) -> BTreeMap<usize, (ClassMap, RunStats)> {
    let mut parts: BTreeMap<usize, (Vec<usize>, Vec<TruthTable>)> = BTreeMap::new();
    for (i, f) in functions.iter().enumerate() {
        let p = parts.entry(f.num_inputs()).or_default();
        p.0.push(i);
        p.1.push(f.clone());
    }
    parts
        .into_iter()
        .map(|(n, (origin, fs))| {
            let (map, mut stats) = classify_unchecked(&fs, method, config);
            for e in &mut stats.errors {
                e.index = origin[e.index];
            }
            (n, (map, stats))
        })
        .collect()
}
