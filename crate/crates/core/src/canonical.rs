// SPDX-License-Identifier: Apache-2.0

//! Influence-aided NPN canonical forms.
//!
//! A canonical form is the member of an NPN class with the smallest
//! [`SignatureVector`]. The vector concatenates, in order:
//!
//! 1. `|g|` and the cofactor counts `|g_{x_1}| .. |g_{x_n}|`
//! 2. the influences `inf_1(g) .. inf_n(g)` (not in the baseline)
//! 3. the permutation cost `C_p(g)` (hybrid and baseline only) and `||g||`
//! 4. the shifted cofactors `||g_{x_1}|| .. ||g_{x_n}||` (hybrid and baseline only)
//! 5. the truth table, highest minterm first
//!
//! Every block is a function of `g` alone, so the minimum over a class is well
//! defined and any two members of a class share it. The pipeline in
//! [`canonicalize`] reaches that minimum without visiting the whole class:
//! each block constrains part of the transform (polarity, phases, the order of
//! variable groups), and only transforms that tie on every block computed so
//! far are kept. [`Method::Exhaustive`] visits every transform and serves as
//! the oracle.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;
use thiserror::Error;

use crate::signatures::{
    arrangement_cost, cofactor_signature, factorial, influence, sers,
    sers_of_positive_cofactor, PermutationCost, SignatureError,
};
use crate::symmetry::detect_symmetry;
use crate::truth_table::{NpnTransform, TruthTable, Var, MAX_INPUTS};

/// Canonicalization strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Cofactor, influence, permutation cost and shifted cofactors.
    Hybrid,
    /// Cofactor, influence and the zeroth-order shifted cofactor only.
    Optimized,
    /// Hybrid without the influence block or influence refinement.
    Baseline,
    /// Every transform in the class, minimizing [`CanonConfig::exhaustive_vector`].
    Exhaustive,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Exhaustive,
        Method::Hybrid,
        Method::Optimized,
        Method::Baseline,
    ];

    /// Name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Method::Hybrid => "inf",
            Method::Optimized => "inf-plus",
            Method::Baseline => "baseline",
            Method::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown method {0:?} (expected exhaustive, inf, inf-plus or baseline)")]
pub struct UnknownMethod(pub String);

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "inf" | "hybrid" => Method::Hybrid,
            "inf-plus" | "inf+" | "optimized" => Method::Optimized,
            "baseline" => Method::Baseline,
            "exhaustive" => Method::Exhaustive,
            _ => return Err(UnknownMethod(s.to_string())),
        })
    }
}

/// Which signature vector defines "smallest".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VectorKind {
    Hybrid,
    Optimized,
    Baseline,
}

impl VectorKind {
    fn uses_influence(self) -> bool {
        !matches!(self, VectorKind::Baseline)
    }

    fn uses_cost(self) -> bool {
        !matches!(self, VectorKind::Optimized)
    }

    fn uses_order1(self) -> bool {
        !matches!(self, VectorKind::Optimized)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonConfig {
    /// Exponent base of the shifted-cofactor signatures.
    pub sers_base: u32,
    /// Largest input count [`Method::Exhaustive`] accepts.
    pub exhaustive_cap: usize,
    /// Vector the exhaustive oracle minimizes.
    pub exhaustive_vector: VectorKind,
    /// Refuse functions whose final enumeration would visit more transforms.
    pub max_enumerations: Option<u128>,
}

impl Default for CanonConfig {
    fn default() -> Self {
        CanonConfig {
            sers_base: 3,
            exhaustive_cap: 6,
            exhaustive_vector: VectorKind::Hybrid,
            max_enumerations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("{0} inputs is outside the supported range 1..={MAX_INPUTS}")]
    InputsOutOfRange(usize),
    #[error("exhaustive canonicalization of {inputs} inputs exceeds the cap of {cap}")]
    ExhaustiveTooLarge { inputs: usize, cap: usize },
    #[error("final enumeration needs {needed} transforms, over the limit of {limit}")]
    EnumerationLimit { needed: u128, limit: u128 },
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

type Ints = SmallVec<[u128; 17]>;

/// The ordered integer blocks of a signature vector followed by the table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureVector {
    pub kind: VectorKind,
    pub ints: Vec<u128>,
    pub table: TruthTable,
}

impl Ord for SignatureVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ints
            .cmp(&other.ints)
            .then_with(|| self.table.cmp(&other.table))
    }
}

impl PartialOrd for SignatureVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const STAGES: usize = 4;

/// Integers of stage `s` of the vector of `g`.
fn stage_ints(g: &TruthTable, kind: VectorKind, base: u32, s: usize) -> Result<Ints, SignatureError> {
    let n = g.num_inputs();
    let mut out = Ints::new();
    match s {
        0 => {
            out.push(g.count_ones() as u128);
            out.extend((0..n).map(|i| g.count_ones_with(Var::new(i), true) as u128));
        }
        1 if kind.uses_influence() => {
            out.extend((0..n).map(|i| influence(g, Var::new(i)) as u128));
        }
        2 => {
            if kind.uses_cost() {
                out.push(permutation_cost_of(g, kind, base)?.0);
            }
            out.push(sers(g, base)?);
        }
        3 if kind.uses_order1() => {
            for i in 0..n {
                out.push(sers_of_positive_cofactor(g, Var::new(i), base)?);
            }
        }
        _ => {}
    }
    Ok(out)
}

/// Full signature vector of `g`.
pub fn signature_vector(g: &TruthTable, kind: VectorKind, base: u32) -> Result<SignatureVector, SignatureError> {
    let mut ints = Vec::new();
    for s in 0..STAGES {
        ints.extend(stage_ints(g, kind, base, s)?);
    }
    Ok(SignatureVector {
        kind,
        ints,
        table: g.clone(),
    })
}

/// `C_p(g)`: distinct orderings left once variables are grouped by equal
/// (cofactor, influence, shifted cofactor) and mutually symmetric members of a
/// group are treated as interchangeable.
pub fn permutation_cost_of(g: &TruthTable, kind: VectorKind, base: u32) -> Result<PermutationCost, SignatureError> {
    let n = g.num_inputs();
    let mut keyed = Vec::with_capacity(n);
    for i in 0..n {
        let v = Var::new(i);
        let inf = if kind.uses_influence() { influence(g, v) } else { 0 };
        let scc: u128 = sers_of_positive_cofactor(g, v, base)?;
        keyed.push(((g.count_ones_with(v, true), inf, scc), v));
    }
    keyed.sort();
    let mut cost = 1u128;
    for run in keyed.chunk_by(|a, b| a.0 == b.0) {
        if run.len() > 1 {
            let vars: Vec<Var> = run.iter().map(|&(_, v)| v).collect();
            cost *= arrangement_cost(&detect_symmetry(g, &vars).sizes()).0;
        }
    }
    Ok(PermutationCost(cost))
}

/// Remaining enumeration after each pruning stage.
///
/// The `phase_*` and `perm_*` counts describe one output polarity and count a
/// class of symmetric variables as a single variable. The last three count
/// work actually done across all polarities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct StageCounters {
    pub polarity_candidates: u128,
    pub phase_after_cof: u128,
    pub phase_after_sym: u128,
    pub perm_after_cof: u128,
    pub perm_after_sym: u128,
    pub perm_after_inf: u128,
    /// Phase assignments generated, over all polarities.
    pub phase_enumerated: u128,
    pub phase_candidates_selected: u128,
    /// Transforms visited by the final enumeration.
    pub final_enumerations: u128,
}

impl StageCounters {
    /// Transforms left after cofactor grouping and symmetry detection.
    pub fn remaining_after_sym(&self) -> u128 {
        self.phase_after_sym * self.perm_after_sym
    }

    /// Transforms left after influence refinement.
    pub fn remaining_after_inf(&self) -> u128 {
        self.phase_after_sym * self.perm_after_inf
    }

    /// `(name, value)` pairs in a fixed order.
    pub fn fields(&self) -> [(&'static str, u128); 9] {
        [
            ("polarity_candidates", self.polarity_candidates),
            ("phase_after_cof", self.phase_after_cof),
            ("phase_after_sym", self.phase_after_sym),
            ("perm_after_cof", self.perm_after_cof),
            ("perm_after_sym", self.perm_after_sym),
            ("perm_after_inf", self.perm_after_inf),
            ("phase_enumerated", self.phase_enumerated),
            ("phase_candidates_selected", self.phase_candidates_selected),
            ("final_enumerations", self.final_enumerations),
        ]
    }
}

impl std::ops::AddAssign for StageCounters {
    fn add_assign(&mut self, o: Self) {
        self.polarity_candidates += o.polarity_candidates;
        self.phase_after_cof += o.phase_after_cof;
        self.phase_after_sym += o.phase_after_sym;
        self.perm_after_cof += o.perm_after_cof;
        self.perm_after_sym += o.perm_after_sym;
        self.perm_after_inf += o.perm_after_inf;
        self.phase_enumerated += o.phase_enumerated;
        self.phase_candidates_selected += o.phase_candidates_selected;
        self.final_enumerations += o.final_enumerations;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalResult {
    pub canonical: TruthTable,
    /// `input.apply(witness) == canonical`.
    pub witness: NpnTransform,
    pub vector: SignatureVector,
    pub counters: StageCounters,
}

/// Variables sharing every signature computed so far, with their symmetry
/// classes. Within a group the variables are in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    /// Cofactor count after phase normalization.
    pub cofactor: u32,
    /// Set once the group has been refined by influence.
    pub influence: Option<u32>,
    pub vars: Vec<Var>,
    pub classes: Vec<Vec<Var>>,
}

/// Working state of the pipeline for one output polarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationState {
    pub out_neg: bool,
    /// The input with output polarity and every determined phase applied.
    pub table: TruthTable,
    /// Phases fixed by the cofactor signature.
    pub forced_phase: u32,
    /// Inputs whose phase is still open.
    pub u_phase: Vec<Var>,
    /// Ordered groups; positions of the canonical form are filled group by group.
    pub groups: Vec<Group>,
}

impl ClassificationState {
    /// Variables that may still move: members of groups with at least two
    /// classes.
    pub fn u_perm(&self) -> Vec<Var> {
        let mut out: Vec<Var> = self
            .groups
            .iter()
            .filter(|g| g.classes.len() > 1)
            .flat_map(|g| g.vars.iter().copied())
            .collect();
        out.sort();
        out
    }

    /// The groups as variable lists, in position order.
    pub fn group_vars(&self) -> Vec<Vec<Var>> {
        self.groups.iter().map(|g| g.vars.clone()).collect()
    }

    fn u_phase_mask(&self) -> u32 {
        self.u_phase.iter().fold(0, |m, v| m | 1 << v.index())
    }

    /// `|g|`, sorted normalized cofactors, then (if refined) influences in
    /// group order: the leading blocks every candidate of this state shares.
    fn prefix(&self, with_influence: bool) -> Vec<u128> {
        let mut out = vec![self.table.count_ones() as u128];
        for g in &self.groups {
            out.extend(g.vars.iter().map(|_| g.cofactor as u128));
        }
        if with_influence {
            for g in &self.groups {
                let inf = g.influence.expect("state not refined by influence");
                out.extend(g.vars.iter().map(|_| inf as u128));
            }
        }
        out
    }
}

/// Output polarities minimizing `|g|`, each with the correspondingly
/// polarized table. Both survive when `|f| = 2^(n-1)`.
pub fn decide_polarity(f: &TruthTable) -> Vec<(bool, TruthTable)> {
    let ones = f.count_ones() as usize;
    let half = f.num_bits() / 2;
    match ones.cmp(&half) {
        Ordering::Less => vec![(false, f.clone())],
        Ordering::Greater => vec![(true, !f.clone())],
        Ordering::Equal => vec![(false, f.clone()), (true, !f.clone())],
    }
}

/// Normalizes phases so `|f_{x_i}| <= |f_{!x_i}|`, groups variables by that
/// count (ascending) and collects the inputs whose phase stays open: those
/// with `|f_{x_i}| = |f| / 2` that `f` depends on. Negating an input `f`
/// ignores is the identity, so those phases are fixed at zero.
///
/// `polarized` must already carry the output polarity `out_neg`.
pub fn group_and_phase_by_cofactor(polarized: &TruthTable, out_neg: bool) -> ClassificationState {
    let n = polarized.num_inputs();
    let sig = cofactor_signature(polarized);
    let mut table = polarized.clone();
    let mut forced_phase = 0u32;
    let mut u_phase = Vec::new();
    let mut keyed = Vec::with_capacity(n);
    for i in 0..n {
        let v = Var::new(i);
        let pos = sig.per_var[i];
        let neg = sig.total - pos;
        if pos > neg {
            table.flip_var(v);
            forced_phase |= 1 << i;
        } else if pos == neg && polarized.depends_on(v) {
            u_phase.push(v);
        }
        keyed.push((pos.min(neg), v));
    }
    keyed.sort();
    let groups = keyed
        .chunk_by(|a, b| a.0 == b.0)
        .map(|run| {
            let vars: Vec<Var> = run.iter().map(|&(_, v)| v).collect();
            Group {
                cofactor: run[0].0,
                influence: None,
                classes: vars.iter().map(|&v| vec![v]).collect(),
                vars,
            }
        })
        .collect();
    ClassificationState {
        out_neg,
        table,
        forced_phase,
        u_phase,
        groups,
    }
}

/// Splits every group into classes of mutually symmetric variables.
pub fn detect_group_symmetry(state: &mut ClassificationState) {
    for g in &mut state.groups {
        g.classes = detect_symmetry(&state.table, &g.vars).classes;
    }
}

/// Splits groups by influence, ascending within each group. Phases are
/// untouched since influence ignores them.
pub fn refine_by_influence(mut state: ClassificationState) -> ClassificationState {
    let mut groups = Vec::with_capacity(state.groups.len());
    for g in state.groups.drain(..) {
        let mut keyed: Vec<(u32, Var)> = g
            .vars
            .iter()
            .map(|&v| (influence(&state.table, v), v))
            .collect();
        keyed.sort();
        for run in keyed.chunk_by(|a, b| a.0 == b.0) {
            let vars: Vec<Var> = run.iter().map(|&(_, v)| v).collect();
            // Symmetric variables share an influence, so classes never split.
            let classes = g
                .classes
                .iter()
                .filter(|c| vars.contains(&c[0]))
                .cloned()
                .collect();
            groups.push(Group {
                cofactor: g.cofactor,
                influence: Some(run[0].0),
                vars,
                classes,
            });
        }
    }
    state.groups = groups;
    state
}

/// Phase assignments over the open inputs, as masks of inputs to negate.
///
/// Symmetric open inputs are interchangeable, so for a class of `k` only the
/// number negated matters: the first `j` members for `j = 0..=k`.
pub fn enumerate_phase_assignments(state: &ClassificationState) -> Vec<u32> {
    let open = state.u_phase_mask();
    let classes: Vec<&Vec<Var>> = state
        .groups
        .iter()
        .flat_map(|g| g.classes.iter())
        .filter(|c| open & (1 << c[0].index()) != 0)
        .collect();
    let mut out = vec![0u32];
    for class in classes {
        let mut next = Vec::with_capacity(out.len() * (class.len() + 1));
        for &m in &out {
            let mut mask = m;
            next.push(mask);
            for v in class {
                mask |= 1 << v.index();
                next.push(mask);
            }
        }
        out = next;
    }
    out
}

/// A polarity and full phase assignment that survived selection, with the
/// position blocks its final enumeration permutes within.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseCandidate {
    pub out_neg: bool,
    /// Full input phase mask, forced and chosen.
    pub phase: u32,
    /// Input with polarity and phase applied, not yet permuted.
    pub table: TruthTable,
    /// Position blocks in order, each split into interchangeable classes.
    pub blocks: Vec<Vec<Vec<Var>>>,
    /// Arrangements the final enumeration visits for this candidate.
    pub cost: PermutationCost,
    key: Vec<u128>,
}

impl PhaseCandidate {
    /// Selection key: the vector blocks shared by every completion of this
    /// candidate.
    pub fn key(&self) -> &[u128] {
        &self.key
    }
}

fn build_candidate(
    state: &ClassificationState,
    chosen: u32,
    prefix: &[u128],
    kind: VectorKind,
    base: u32,
) -> Result<PhaseCandidate, SignatureError> {
    let mut table = state.table.clone();
    for v in &state.u_phase {
        if chosen & (1 << v.index()) != 0 {
            table.flip_var(*v);
        }
    }

    let mut blocks: Vec<Vec<Var>> = Vec::new();
    let mut order1: Vec<u128> = Vec::new();
    for g in &state.groups {
        if kind.uses_order1() {
            let mut keyed = Vec::with_capacity(g.vars.len());
            for &v in &g.vars {
                keyed.push((sers_of_positive_cofactor::<u128>(&table, v, base)?, v));
            }
            keyed.sort();
            for run in keyed.chunk_by(|a, b| a.0 == b.0) {
                order1.extend(run.iter().map(|r| r.0));
                blocks.push(run.iter().map(|r| r.1).collect());
            }
        } else {
            blocks.push(g.vars.clone());
        }
    }

    let mut cost = 1u128;
    let blocks: Vec<Vec<Vec<Var>>> = blocks
        .into_iter()
        .map(|b| {
            let classes = detect_symmetry(&table, &b);
            cost *= arrangement_cost(&classes.sizes()).0;
            classes.classes
        })
        .collect();

    let mut key = prefix.to_vec();
    if kind.uses_cost() {
        key.push(cost);
    }
    key.push(sers::<u128>(&table, base)?);
    key.extend(order1);

    Ok(PhaseCandidate {
        out_neg: state.out_neg,
        phase: state.forced_phase | chosen,
        table,
        blocks,
        cost: PermutationCost(cost),
        key,
    })
}

/// Builds every phase candidate of every state and keeps those with the
/// smallest key. Returns the survivors and how many were generated.
pub fn select_phase_candidates(
    states: &[ClassificationState],
    kind: VectorKind,
    base: u32,
) -> Result<(Vec<PhaseCandidate>, u128), SignatureError> {
    let mut best: Vec<PhaseCandidate> = Vec::new();
    let mut generated = 0u128;
    for state in states {
        let prefix = state.prefix(kind.uses_influence());
        for chosen in enumerate_phase_assignments(state) {
            generated += 1;
            let cand = build_candidate(state, chosen, &prefix, kind, base)?;
            match best.first().map(|b| cand.key.cmp(&b.key)) {
                None | Some(Ordering::Equal) => best.push(cand),
                Some(Ordering::Less) => {
                    best.clear();
                    best.push(cand);
                }
                Some(Ordering::Greater) => {}
            }
        }
    }
    Ok((best, generated))
}

fn next_permutation(xs: &mut [u8]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

struct Arranger<'a> {
    cand: &'a PhaseCandidate,
    starts: Vec<usize>,
    labels: Vec<Vec<u8>>,
    perm: [u8; MAX_INPUTS],
    best: &'a mut Option<(TruthTable, NpnTransform)>,
    visited: u128,
}

impl Arranger<'_> {
    fn run(&mut self, block: usize) {
        if block == self.labels.len() {
            self.visit();
            return;
        }
        self.labels[block].sort_unstable();
        loop {
            let start = self.starts[block];
            let classes = &self.cand.blocks[block];
            let mut used = [0usize; MAX_INPUTS];
            for (k, &l) in self.labels[block].iter().enumerate() {
                let v = classes[l as usize][used[l as usize]];
                used[l as usize] += 1;
                self.perm[v.index()] = (start + k) as u8;
            }
            self.run(block + 1);
            if !next_permutation(&mut self.labels[block]) {
                break;
            }
        }
    }

    fn visit(&mut self) {
        self.visited += 1;
        let n = self.cand.table.num_inputs();
        let mut g = self.cand.table.clone();
        g.permute_in_place(&self.perm[..n]);
        let better = match self.best {
            Some((b, _)) => g < *b,
            None => true,
        };
        if better {
            let t = NpnTransform::new(self.cand.out_neg, self.cand.phase, &self.perm[..n])
                .expect("arrangement is a permutation");
            *self.best = Some((g, t));
        }
    }
}

fn enumerate_arrangements(cand: &PhaseCandidate, best: &mut Option<(TruthTable, NpnTransform)>) -> u128 {
    let mut starts = Vec::with_capacity(cand.blocks.len());
    let mut labels = Vec::with_capacity(cand.blocks.len());
    let mut pos = 0;
    for classes in &cand.blocks {
        starts.push(pos);
        let mut l = Vec::new();
        for (ci, c) in classes.iter().enumerate() {
            l.extend(std::iter::repeat_n(ci as u8, c.len()));
            pos += c.len();
        }
        labels.push(l);
    }
    let mut a = Arranger {
        cand,
        starts,
        labels,
        perm: [0; MAX_INPUTS],
        best,
        visited: 0,
    };
    a.run(0);
    a.visited
}

fn pow2(k: usize) -> u128 {
    1u128 << k
}

fn open_class_count(state: &ClassificationState) -> usize {
    let open = state.u_phase_mask();
    state
        .groups
        .iter()
        .flat_map(|g| g.classes.iter())
        .filter(|c| open & (1 << c[0].index()) != 0)
        .count()
}

/// Permutation units of a group before symmetry detection: inputs the
/// function ignores are interchangeable and count once.
fn units_before_symmetry(table: &TruthTable, g: &Group) -> usize {
    let support = g.vars.iter().filter(|&&v| table.depends_on(v)).count();
    support + usize::from(support < g.vars.len())
}

/// Canonical form under `method` with the default configuration.
pub fn canonicalize(f: &TruthTable, method: Method) -> Result<CanonicalResult, CanonError> {
    canonicalize_with(f, method, &CanonConfig::default())
}

pub fn canonicalize_with(f: &TruthTable, method: Method, config: &CanonConfig) -> Result<CanonicalResult, CanonError> {
    let n = f.num_inputs();
    if !(1..=MAX_INPUTS).contains(&n) {
        return Err(CanonError::InputsOutOfRange(n));
    }
    let base = config.sers_base;
    let kind = match method {
        Method::Hybrid => VectorKind::Hybrid,
        Method::Optimized => VectorKind::Optimized,
        Method::Baseline => VectorKind::Baseline,
        Method::Exhaustive => return exhaustive(f, config),
    };
    let use_influence = kind.uses_influence();

    let mut counters = StageCounters::default();
    let mut states = Vec::with_capacity(2);
    for (idx, (out_neg, polarized)) in decide_polarity(f).into_iter().enumerate() {
        let mut state = group_and_phase_by_cofactor(&polarized, out_neg);
        let first = idx == 0;
        if first {
            counters.phase_after_cof = pow2(state.u_phase.len());
            counters.perm_after_cof = state
                .groups
                .iter()
                .map(|g| factorial(units_before_symmetry(&state.table, g)))
                .product();
        }
        detect_group_symmetry(&mut state);
        if first {
            counters.phase_after_sym = pow2(open_class_count(&state));
            counters.perm_after_sym = class_perm_count(&state);
        }
        if use_influence {
            state = refine_by_influence(state);
        }
        if first {
            counters.perm_after_inf = class_perm_count(&state);
        }
        states.push(state);
    }
    counters.polarity_candidates = states.len() as u128;

    let (selected, generated) = select_phase_candidates(&states, kind, base)?;
    counters.phase_enumerated = generated;
    counters.phase_candidates_selected = selected.len() as u128;

    if let Some(limit) = config.max_enumerations {
        let needed = selected.iter().map(|c| c.cost.0).fold(0u128, u128::saturating_add);
        if needed > limit {
            return Err(CanonError::EnumerationLimit { needed, limit });
        }
    }
    let mut best = None;
    for cand in &selected {
        counters.final_enumerations += enumerate_arrangements(cand, &mut best);
    }
    let (canonical, witness) = best.expect("at least one candidate survives");
    debug_assert_eq!(f.apply(&witness).as_ref(), Ok(&canonical));
    let vector = signature_vector(&canonical, kind, base)?;
    debug_assert_eq!(&vector.ints[..selected[0].key.len()], selected[0].key());
    Ok(CanonicalResult {
        canonical,
        witness,
        vector,
        counters,
    })
}

fn class_perm_count(state: &ClassificationState) -> u128 {
    state.groups.iter().map(|g| factorial(g.classes.len())).product()
}

/// Per-polarity counters of the pipeline; see [`StageCounters`].
pub fn stage_counters(f: &TruthTable, method: Method) -> Result<StageCounters, CanonError> {
    canonicalize(f, method).map(|r| r.counters)
}

/// Variable groups after the cofactor stage and, when `use_influence`, the
/// influence stage, for the first output polarity candidate.
pub fn variable_groups(f: &TruthTable, use_influence: bool) -> Vec<Vec<Var>> {
    let (out_neg, polarized) = decide_polarity(f).swap_remove(0);
    let mut state = group_and_phase_by_cofactor(&polarized, out_neg);
    if use_influence {
        state = refine_by_influence(state);
    }
    state.group_vars()
}

/// Lazily computed vector stages, so most transforms are rejected after
/// the first block.
struct Staged {
    g: TruthTable,
    stages: [Option<Ints>; STAGES],
}

impl Staged {
    fn new(g: TruthTable) -> Self {
        Staged {
            g,
            stages: Default::default(),
        }
    }

    fn stage(&mut self, s: usize, kind: VectorKind, base: u32) -> Result<&Ints, SignatureError> {
        if self.stages[s].is_none() {
            self.stages[s] = Some(stage_ints(&self.g, kind, base, s)?);
        }
        Ok(self.stages[s].as_ref().unwrap())
    }

    fn cmp(&mut self, other: &mut Staged, kind: VectorKind, base: u32) -> Result<Ordering, SignatureError> {
        for s in 0..STAGES {
            let a = self.stage(s, kind, base)?.clone();
            let ord = a.cmp(other.stage(s, kind, base)?);
            if ord != Ordering::Equal {
                return Ok(ord);
            }
        }
        Ok(self.g.cmp(&other.g))
    }
}

/// Visits all `2^(n+1) n!` transforms: outputs and phases in Gray-code order,
/// permutations by Heap's algorithm, one swap per step.
fn exhaustive(f: &TruthTable, config: &CanonConfig) -> Result<CanonicalResult, CanonError> {
    let n = f.num_inputs();
    if n > config.exhaustive_cap {
        return Err(CanonError::ExhaustiveTooLarge {
            inputs: n,
            cap: config.exhaustive_cap,
        });
    }
    let kind = config.exhaustive_vector;
    let base = config.sers_base;
    let mut best: Option<(Staged, NpnTransform)> = None;
    let mut visited = 0u128;

    for out_neg in [false, true] {
        let mut h = if out_neg { !f.clone() } else { f.clone() };
        let mut phase = 0u32;
        for k in 0..(1u32 << n) {
            if k > 0 {
                let bit = k.trailing_zeros() as usize;
                h.flip_var(Var::new(bit));
                phase ^= 1 << bit;
            }
            let mut g = h.clone();
            // at[pos] is the input currently sitting at position pos.
            let mut at: [u8; MAX_INPUTS] = std::array::from_fn(|i| i as u8);
            let mut c = [0usize; MAX_INPUTS];
            let mut visit = |g: &TruthTable, at: &[u8; MAX_INPUTS]| -> Result<(), SignatureError> {
                visited += 1;
                let mut cand = Staged::new(g.clone());
                let better = match &mut best {
                    None => true,
                    Some((b, _)) => cand.cmp(b, kind, base)? == Ordering::Less,
                };
                if better {
                    let mut perm = [0u8; MAX_INPUTS];
                    for pos in 0..n {
                        perm[at[pos] as usize] = pos as u8;
                    }
                    let t = NpnTransform::new(out_neg, phase, &perm[..n]).expect("valid transform");
                    best = Some((cand, t));
                }
                Ok(())
            };
            visit(&g, &at)?;
            let mut i = 1;
            while i < n {
                if c[i] < i {
                    let j = if i % 2 == 0 { 0 } else { c[i] };
                    g.swap_vars(Var::new(j), Var::new(i));
                    at.swap(j, i);
                    visit(&g, &at)?;
                    c[i] += 1;
                    i = 1;
                } else {
                    c[i] = 0;
                    i += 1;
                }
            }
        }
    }

    let (staged, witness) = best.expect("transform space is non-empty");
    let canonical = staged.g;
    debug_assert_eq!(f.apply(&witness).as_ref(), Ok(&canonical));
    let vector = signature_vector(&canonical, kind, base)?;
    let full = pow2(n + 1) * factorial(n);
    let counters = StageCounters {
        polarity_candidates: 2,
        phase_after_cof: pow2(n),
        phase_after_sym: pow2(n),
        perm_after_cof: factorial(n),
        perm_after_sym: factorial(n),
        perm_after_inf: factorial(n),
        phase_enumerated: pow2(n + 1),
        phase_candidates_selected: pow2(n + 1),
        final_enumerations: visited,
    };
    debug_assert_eq!(visited, full);
    Ok(CanonicalResult {
        canonical,
        witness,
        vector,
        counters,
    })
}
