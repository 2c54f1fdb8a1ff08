// SPDX-License-Identifier: Apache-2.0

//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::collections::HashMap;
use std::process::Command;
use std::time::{Duration, Instant};

use npn::canonical::{canonicalize, canonicalize_with, variable_groups, CanonConfig, Method};
use npn::ingest::{
    cut_truth_table, enumerate_cuts, extract_functions, lit_is_complemented, lit_node, parse_aag, Aig, AigBuilder,
    Lit, NodeKind,
};
use npn::oracle::{all_transforms, orbit_ids};
use npn::signatures::{cofactor_signature, influence_signature, sers};
use npn::symmetry::is_symmetric;
use npn::{NpnTransform, TruthTable, Var};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

const N3_BUDGET: Duration = Duration::from_secs(1);
const N4_BUDGET: Duration = Duration::from_secs(60);
const PROPERTY_TRIALS: usize = 10_000;
const REDUCTION_FUNCTIONS: usize = 1_000;
const RANDOM_AIGS: usize = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn tt(hex: &str) -> TruthTable {
    hex.parse().unwrap()
}

/// Partition of all tables of `n` inputs under `m`, as a label per table in
/// first-seen order, checked against brute-force orbits.
fn partition(n: usize, m: Method, orbits: &[u32]) -> Result<Vec<u32>, String> {
    let mut label: HashMap<TruthTable, u32> = HashMap::new();
    let mut out = Vec::with_capacity(orbits.len());
    for w in 0..orbits.len() as u64 {
        let f = TruthTable::from_u64(n, w);
        let r = canonicalize(&f, m).map_err(|e| e.to_string())?;
        if f.apply(&r.witness).unwrap() != r.canonical {
            return Err(format!("{m}: bad witness for {f}"));
        }
        let next = label.len() as u32;
        out.push(*label.entry(r.canonical).or_insert(next));
    }
    // Same classes as the orbits iff labels and orbit ids determine each other.
    let mut fwd: HashMap<u32, u32> = HashMap::new();
    let mut back: HashMap<u32, u32> = HashMap::new();
    for (w, &l) in out.iter().enumerate() {
        if *fwd.entry(l).or_insert(orbits[w]) != orbits[w] || *back.entry(orbits[w]).or_insert(l) != l {
            return Err(format!("{m}: partition differs from the orbits at {}", TruthTable::from_u64(n, w as u64)));
        }
    }
    Ok(out)
}

fn all_functions(n: usize, expected_classes: u32, transforms: usize, budget: Duration) -> Outcome {
    let (orbits, count) = orbit_ids(n);
    if count != expected_classes || all_transforms(n).len() != transforms {
        return outcome(false, format!("oracle found {count} orbits"));
    }
    let start = Instant::now();
    let mut first: Option<Vec<u32>> = None;
    let mut classes = Vec::new();
    for m in Method::ALL {
        match partition(n, m, &orbits) {
            Ok(p) => {
                classes.push(format!("{m}={}", p.iter().max().map_or(0, |x| x + 1)));
                if first.get_or_insert_with(|| p.clone()) != &p {
                    return outcome(false, format!("{m} partition differs"));
                }
            }
            Err(e) => return outcome(false, e),
        }
    }
    let took = start.elapsed();
    let expected = Method::ALL.map(|m| format!("{m}={expected_classes}")).to_vec();
    outcome(
        classes == expected && took < budget,
        format!("{}; {:.2}s (limit {}s)", classes.join(" "), took.as_secs_f64(), budget.as_secs()),
    )
}

fn criterion_1() -> Outcome {
    all_functions(3, 14, 96, N3_BUDGET)
}

fn criterion_2() -> Outcome {
    all_functions(4, 222, 768, N4_BUDGET)
}

fn criterion_3() -> Outcome {
    let f = tt("5DAE51AE5DA251A2");
    let cof = cofactor_signature(&f).per_var;
    let inf = influence_signature(&f).per_var;
    let want_cof = vec![16, 16, 16, 16, 18, 18];
    let want_inf = vec![24, 8, 28, 4, 4, 4];
    outcome(
        cof == want_cof && inf == want_inf,
        format!("cofactor {cof:?} (expected {want_cof:?}), influence {inf:?} (expected {want_inf:?})"),
    )
}

fn groups_text(groups: &[Vec<Var>]) -> String {
    let mut gs: Vec<Vec<usize>> = groups.iter().map(|g| g.iter().map(|v| v.index() + 1).collect()).collect();
    gs.sort();
    gs.iter()
        .map(|g| format!("({})", g.iter().map(|i| format!("x{i}")).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join("")
}

fn criterion_4() -> Outcome {
    let f = tt("5DAE51AE5DA251A2");
    let cof = groups_text(&variable_groups(&f, false));
    let inf = groups_text(&variable_groups(&f, true));
    let (want_cof, want_inf) = ("(x1,x2,x3,x4)(x5,x6)", "(x1)(x2)(x3)(x4)(x5,x6)");
    outcome(
        cof == want_cof && inf == want_inf,
        format!("cofactor {cof} (expected {want_cof}), cofactor+influence {inf} (expected {want_inf})"),
    )
}

fn criterion_5() -> Outcome {
    let f = tt("FFFF3777C8880000");
    let s = cofactor_signature(&f);
    let mut s_cof = vec![s.total];
    s_cof.extend(&s.per_var);
    let s_inf = influence_signature(&f).per_var;
    let sym = is_symmetric(&f, Var::x(3), Var::x(4));
    let c = canonicalize(&f, Method::Hybrid).unwrap().counters;
    let want_cof = vec![32, 16, 16, 16, 16, 27, 21];
    let want_inf = vec![6, 10, 2, 2, 10, 22];
    let counters_ok = c.remaining_after_sym() == 48 && c.perm_after_inf == 1 && c.phase_after_sym == 8;
    outcome(
        s_cof == want_cof && s_inf == want_inf && sym && counters_ok,
        format!(
            "S_cof {s_cof:?} (expected {want_cof:?}), S_inf {s_inf:?} (expected {want_inf:?}), x3~x4 {sym}, \
             after cofactor+symmetry {} = {} phases x {} perms, after influence {} perms x {} phases",
            c.remaining_after_sym(),
            c.phase_after_sym,
            c.perm_after_sym,
            c.perm_after_inf,
            c.phase_after_sym
        ),
    )
}

fn random_table(rng: &mut ChaCha8Rng, n: usize) -> TruthTable {
    let words: Vec<u64> = (0..(1usize << n).div_ceil(64)).map(|_| rng.gen()).collect();
    TruthTable::from_words(n, &words)
}

fn random_transform(rng: &mut ChaCha8Rng, n: usize) -> NpnTransform {
    let mut perm: Vec<u8> = (0..n as u8).collect();
    perm.shuffle(rng);
    NpnTransform::new(rng.gen(), rng.gen_range(0..1u32 << n), &perm).unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut violations: Vec<String> = Vec::new();
    let mut checks = 0u64;
    let cfg = CanonConfig::default();
    for trial in 0..PROPERTY_TRIALS {
        let n = rng.gen_range(3..=10);
        let f = random_table(&mut rng, n);
        let t = random_transform(&mut rng, n);
        let g = f.apply(&t).unwrap();
        let mut check = |ok: bool, what: &str| {
            checks += 1;
            if !ok && violations.len() < 5 {
                violations.push(format!("trial {trial} {what}"));
            }
        };
        let inf = influence_signature(&f).per_var;
        let ident: Vec<u8> = (0..n as u8).collect();
        let phased = f.apply(&NpnTransform::new(false, t.phase(), &ident).unwrap()).unwrap();
        check(influence_signature(&phased).per_var == inf, "input negation");
        check(influence_signature(&!f.clone()).per_var == inf, "output negation");
        let inf_g = influence_signature(&g).per_var;
        check((0..n).all(|i| inf_g[t.perm()[i] as usize] == inf[i]), "permutation");
        let cof = cofactor_signature(&f);
        check((0..n).all(|i| cof.per_var[i] + cof.negative(Var::new(i)) == cof.total), "cofactor complement");
        let permuted = f.apply(&NpnTransform::permutation(t.perm()).unwrap()).unwrap();
        check(sers::<u128>(&permuted, 3) == sers::<u128>(&f, 3), "SERS permutation");
        for m in Method::ALL {
            if m == Method::Exhaustive && n > cfg.exhaustive_cap {
                continue;
            }
            let a = canonicalize_with(&f, m, &cfg).unwrap();
            let b = canonicalize_with(&g, m, &cfg).unwrap();
            check(a.canonical == b.canonical, m.name());
            check(f.apply(&a.witness).unwrap() == a.canonical, "witness");
            check(g.apply(&b.witness).unwrap() == b.canonical, "witness");
        }
    }
    outcome(
        violations.is_empty(),
        format!("{PROPERTY_TRIALS} trials, n in 3..=10, seed {SEED}, {checks} checks, violations {violations:?}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut worse = 0;
    let (mut before, mut after) = (0u128, 0u128);
    let (mut enum_inf, mut enum_base) = (0u128, 0u128);
    for _ in 0..REDUCTION_FUNCTIONS {
        let f = random_table(&mut rng, 8);
        let a = canonicalize(&f, Method::Hybrid).unwrap().counters;
        let b = canonicalize(&f, Method::Baseline).unwrap().counters;
        if a.final_enumerations > b.final_enumerations {
            worse += 1;
        }
        enum_inf += a.final_enumerations;
        enum_base += b.final_enumerations;
        before += a.perm_after_sym;
        after += a.perm_after_inf;
    }
    outcome(
        worse == 0 && after <= before,
        format!(
            "{REDUCTION_FUNCTIONS} functions: inf > baseline on {worse}; #Enum inf {enum_inf} vs baseline {enum_base}; \
             #Perm {before} before influence, {after} after"
        ),
    )
}

const SINGLE_AND: &str = "aag 3 2 0 1 1\n2\n4\n6\n6 4 2\n";
const CHAIN: &str = "aag 5 3 0 1 2\n2\n4\n6\n10\n8 2 4\n10 8 6\n";
const NEG_AND: &str = "aag 3 2 0 1 1\n2\n4\n6\n6 3 4\n";

fn eval(aig: &Aig, node: u32, leaves: &[u32], minterm: usize) -> bool {
    if let Ok(i) = leaves.binary_search(&node) {
        return minterm >> i & 1 == 1;
    }
    match aig.kind(node) {
        NodeKind::Const => false,
        NodeKind::And(_) => {
            let g = aig.gate(node).unwrap();
            let lit = |l: Lit| eval(aig, lit_node(l), leaves, minterm) ^ lit_is_complemented(l);
            lit(g.fanin0) && lit(g.fanin1)
        }
        _ => panic!("cone escapes cut"),
    }
}

fn hexes(aig: &str, k: usize) -> Vec<String> {
    let aig = parse_aag(aig).unwrap();
    extract_functions(&aig, k, 64, false).unwrap().iter().map(TruthTable::to_hex).collect()
}

fn criterion_8() -> Outcome {
    let single = hexes(SINGLE_AND, 2);
    let chain = hexes(CHAIN, 3);
    let neg = hexes(NEG_AND, 2);
    let fixtures_ok = single == ["8"] && chain == ["8", "8", "80"] && neg == ["4"];

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let mut mismatches = 0;
    let mut tables = 0;
    for _ in 0..RANDOM_AIGS {
        let mut b = AigBuilder::new();
        let mut lits: Vec<Lit> = vec![0];
        for _ in 0..rng.gen_range(2..=5) {
            lits.push(b.input());
        }
        for _ in 0..8 {
            let x = *lits.choose(&mut rng).unwrap() ^ rng.gen::<bool>() as u32;
            let y = *lits.choose(&mut rng).unwrap() ^ rng.gen::<bool>() as u32;
            lits.push(b.and(x, y));
        }
        b.output(*lits.last().unwrap());
        let aig = b.finish();
        let sets = enumerate_cuts(&aig, 6, 64).unwrap();
        for g in &aig.ands {
            for cut in sets.of(g.node) {
                let t = cut_truth_table(&aig, g.node, cut).unwrap();
                tables += 1;
                if (0..1usize << cut.len()).any(|m| t.bit(m) != eval(&aig, g.node, cut, m)) {
                    mismatches += 1;
                }
            }
        }
    }
    outcome(
        fixtures_ok && mismatches == 0,
        format!(
            "single AND {single:?}, chain {chain:?}, AND(!a,b) {neg:?}; {RANDOM_AIGS} random 8-gate AIGs, \
             {tables} cut tables, {mismatches} mismatches"
        ),
    )
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut corpus: Vec<TruthTable> = Vec::new();
    for n in [3usize, 5, 6, 8] {
        for _ in 0..300 {
            let f = random_table(&mut rng, n);
            let t = random_transform(&mut rng, n);
            corpus.push(f.apply(&t).unwrap());
            if rng.gen_bool(0.5) {
                corpus.push(f);
            }
        }
    }
    corpus.shuffle(&mut rng);
    let mut text = String::new();
    for f in &corpus {
        text.push_str(&format!("# n={}\n{}\n", f.num_inputs(), f.to_hex()));
    }
    let input = dir.path().join("corpus.txt");
    std::fs::write(&input, text).unwrap();
    let run = |jobs: &str| {
        let out = dir.path().join(format!("classes-{jobs}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_npn"))
            .args(["classify", input.to_str().unwrap(), "--jobs", jobs, "--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        (status.status.success(), std::fs::read(out).unwrap_or_default())
    };
    let (ok1, a) = run("1");
    let (ok8, b) = run("8");
    outcome(
        ok1 && ok8 && !a.is_empty() && a == b,
        format!("{} functions, {} CSV bytes, identical {}", corpus.len(), a.len(), a == b),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle exactness, all 3-input functions", criterion_1),
        ("oracle exactness, all 4-input functions", criterion_2),
        ("cofactor and influence signatures of 0x5DAE51AE5DA251A2", criterion_3),
        ("variable grouping of 0x5DAE51AE5DA251A2", criterion_4),
        ("pipeline example 0xFFFF3777C8880000", criterion_5),
        ("invariance property suite", criterion_6),
        ("enumeration reduction on random 8-input functions", criterion_7),
        ("cut extraction fixtures and re-simulation", criterion_8),
        ("classification determinism across worker counts", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {verdict}: {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
