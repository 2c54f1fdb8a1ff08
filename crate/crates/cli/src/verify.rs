// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use anyhow::anyhow;
use clap::Args;
use npn::canonical::canonicalize_with;
use npn::oracle::orbit_ids;
use npn::signatures::{cofactor_signature, influence_signature, sers};
use npn::{CanonConfig, Method, NpnTransform, TruthTable, VectorKind};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{thread_pool, CmdResult, Failure};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Input count of the functions checked.
    #[arg(long, default_value_t = 4)]
    pub inputs: usize,
    /// Random functions checked.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Also check every function against brute-force orbits (at most 4
    /// inputs; always done up to 3).
    #[arg(long)]
    pub exhaustive: bool,
    /// Methods to check, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "exhaustive,inf,inf-plus,baseline")]
    pub methods: Vec<Method>,
    /// Base seed; sample `i` uses `seed + i`.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub sers_base: u32,
    #[arg(long, default_value_t = 6)]
    pub exhaustive_cap: usize,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

fn kind_of(m: Method) -> VectorKind {
    match m {
        Method::Optimized => VectorKind::Optimized,
        Method::Baseline => VectorKind::Baseline,
        _ => VectorKind::Hybrid,
    }
}

fn random_transform(rng: &mut ChaCha8Rng, n: usize) -> NpnTransform {
    let mut perm: Vec<u8> = (0..n as u8).collect();
    perm.shuffle(rng);
    NpnTransform::new(rng.gen(), rng.gen_range(0..1u32 << n), &perm).expect("valid transform")
}

/// Structured tables tie more often than uniform ones.
fn random_table(rng: &mut ChaCha8Rng, n: usize) -> TruthTable {
    let words = (1usize << n).div_ceil(64);
    match rng.gen_range(0..4) {
        0 => {
            let k = rng.gen_range(0..=n);
            let bias: u32 = rng.gen_range(0..3);
            TruthTable::from_fn(n, |m| (m.count_ones() + bias) as usize % 3 < k % 3 + 1)
        }
        1 => {
            let a = TruthTable::from_words(n, &(0..words).map(|_| rng.gen()).collect::<Vec<u64>>());
            let b = TruthTable::from_words(n, &(0..words).map(|_| rng.gen()).collect::<Vec<u64>>());
            &a & &b
        }
        _ => TruthTable::from_words(n, &(0..words).map(|_| rng.gen()).collect::<Vec<u64>>()),
    }
}

fn check_sample(n: usize, seed: u64, methods: &[Method], base: u32, cap: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_table(&mut rng, n);
    let t = random_transform(&mut rng, n);
    let g = f.apply(&t).expect("sized");
    let mut bad = Vec::new();
    let mut fail = |what: String| bad.push(format!("FAIL seed {seed}: {what} (f={f}, t={t})"));

    let (inf_f, inf_g) = (influence_signature(&f), influence_signature(&g));
    for i in 0..n {
        if inf_g.per_var[t.perm()[i] as usize] != inf_f.per_var[i] {
            fail(format!("influence of x{} not carried by the transform", i + 1));
        }
    }
    let np = NpnTransform::new(t.out_neg(), t.phase(), &(0..n as u8).collect::<Vec<_>>()).expect("valid");
    if influence_signature(&f.apply(&np).expect("sized")) != inf_f {
        fail("influence changed under input or output negation".into());
    }
    let cof = cofactor_signature(&f);
    for i in 0..n {
        if cof.per_var[i] + cof.negative(npn::Var::new(i)) != cof.total {
            fail(format!("cofactor counts of x{} do not sum to |f|", i + 1));
        }
    }
    let perm_only = NpnTransform::permutation(t.perm()).expect("valid");
    if sers::<u128>(&f, base).ok() != sers::<u128>(&f.apply(&perm_only).expect("sized"), base).ok() {
        fail("SERS changed under permutation".into());
    }

    for &m in methods {
        let cfg = CanonConfig {
            sers_base: base,
            exhaustive_cap: cap,
            exhaustive_vector: VectorKind::Hybrid,
            max_enumerations: None,
        };
        if m == Method::Exhaustive && n > cap {
            continue;
        }
        let (a, b) = match (canonicalize_with(&f, m, &cfg), canonicalize_with(&g, m, &cfg)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                fail(format!("{m}: {e}"));
                continue;
            }
        };
        if a.canonical != b.canonical {
            fail(format!("{m}: canonical forms differ within a class"));
        }
        if f.apply(&a.witness).ok().as_ref() != Some(&a.canonical) {
            fail(format!("{m}: witness does not reproduce the canonical form"));
        }
        if m != Method::Exhaustive && n <= cap {
            let oracle_cfg = CanonConfig {
                exhaustive_vector: kind_of(m),
                ..cfg
            };
            match canonicalize_with(&f, Method::Exhaustive, &oracle_cfg) {
                Ok(o) if o.vector != a.vector => fail(format!("{m}: not the minimum over the class")),
                Ok(_) => {}
                Err(e) => fail(format!("{m} oracle: {e}")),
            }
        }
    }
    bad
}

fn check_all(n: usize, methods: &[Method], cfg: &CanonConfig) -> Result<u32, Vec<String>> {
    let (ids, count) = orbit_ids(n);
    let mut bad = Vec::new();
    for &m in methods {
        if m == Method::Exhaustive && n > cfg.exhaustive_cap {
            continue;
        }
        let canon: Vec<Result<TruthTable, String>> = (0..ids.len() as u64)
            .into_par_iter()
            .map(|w| {
                let f = TruthTable::from_u64(n, w);
                let r = canonicalize_with(&f, m, cfg).map_err(|e| e.to_string())?;
                if f.apply(&r.witness).ok().as_ref() != Some(&r.canonical) {
                    return Err(format!("witness of {f} is wrong"));
                }
                Ok(r.canonical)
            })
            .collect();
        let mut by_orbit: HashMap<u32, TruthTable> = HashMap::new();
        let mut orbit_of: HashMap<TruthTable, u32> = HashMap::new();
        for (w, c) in canon.into_iter().enumerate() {
            let c = match c {
                Ok(c) => c,
                Err(e) => {
                    bad.push(format!("FAIL {m}: {e}"));
                    continue;
                }
            };
            let id = ids[w];
            if by_orbit.entry(id).or_insert_with(|| c.clone()) != &c {
                bad.push(format!("FAIL {m}: class of {} split", TruthTable::from_u64(n, w as u64)));
            }
            if *orbit_of.entry(c.clone()).or_insert(id) != id {
                bad.push(format!("FAIL {m}: two classes share canonical form {c}"));
            }
        }
    }
    if bad.is_empty() {
        Ok(count)
    } else {
        Err(bad)
    }
}

pub fn run(a: VerifyArgs) -> CmdResult {
    let n = a.inputs;
    if !(1..=npn::MAX_INPUTS).contains(&n) {
        return Err(anyhow!("--inputs must be in 1..={}", npn::MAX_INPUTS).into());
    }
    if a.exhaustive && n > 4 {
        return Err(anyhow!("--exhaustive enumerates every table and needs --inputs <= 4").into());
    }
    if a.sers_base < 2 {
        return Err(anyhow!("--sers-base must be at least 2").into());
    }
    let pool = thread_pool(a.jobs)?;
    let cfg = CanonConfig {
        sers_base: a.sers_base,
        exhaustive_cap: a.exhaustive_cap,
        exhaustive_vector: VectorKind::Hybrid,
        max_enumerations: None,
    };
    let names: Vec<&str> = a.methods.iter().map(|m| m.name()).collect();
    let mut violations = Vec::new();

    if a.exhaustive || n <= 3 {
        match pool.install(|| check_all(n, &a.methods, &cfg)) {
            Ok(count) => println!("PASS exhaustive n={n}: {count} classes confirmed for {}", names.join(", ")),
            Err(v) => violations.extend(v),
        }
    }

    if a.samples > 0 {
        let per: Vec<Vec<String>> = pool.install(|| {
            (0..a.samples as u64)
                .into_par_iter()
                .map(|i| check_sample(n, a.seed.wrapping_add(i), &a.methods, a.sers_base, a.exhaustive_cap))
                .collect()
        });
        let before = violations.len();
        violations.extend(per.into_iter().flatten());
        if violations.len() == before {
            println!("PASS samples n={n}: {} random orbit checks, seed {}", a.samples, a.seed);
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        for v in &violations {
            println!("{v}");
        }
        Err(Failure::Invariant(anyhow!("{} violation(s)", violations.len())))
    }
}
