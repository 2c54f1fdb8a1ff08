// SPDX-License-Identifier: Apache-2.0

use npn::canonical::{canonicalize, Method};
use npn::signatures::{cofactor_signature, influence_signature, sers, shifted_cofactor_signature};
use npn::{NpnTransform, StageCounters, TruthTable, Var};
use proptest::prelude::*;

fn table(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = TruthTable> {
    n.prop_flat_map(|n| {
        let words = (1usize << n).div_ceil(64);
        prop::collection::vec(any::<u64>(), words).prop_map(move |w| TruthTable::from_words(n, &w))
    })
}

fn transform(n: usize) -> impl Strategy<Value = NpnTransform> {
    let perm = Just((0..n as u8).collect::<Vec<u8>>()).prop_shuffle();
    (any::<bool>(), 0u32..(1 << n), perm).prop_map(|(o, p, perm)| NpnTransform::new(o, p, &perm).unwrap())
}

fn with_transform(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (TruthTable, NpnTransform)> {
    table(n).prop_flat_map(|f| {
        let n = f.num_inputs();
        (Just(f), transform(n))
    })
}

fn with_two(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (TruthTable, NpnTransform, NpnTransform)> {
    table(n).prop_flat_map(|f| {
        let n = f.num_inputs();
        (Just(f), transform(n), transform(n))
    })
}

fn monotone(c: &StageCounters) -> bool {
    c.phase_after_sym <= c.phase_after_cof
        && c.perm_after_sym <= c.perm_after_cof
        && c.perm_after_inf <= c.perm_after_sym
        && c.phase_candidates_selected <= c.phase_enumerated
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hex_round_trip(f in table(1..=12)) {
        prop_assert_eq!(TruthTable::parse_hex(&f.to_hex(), Some(f.num_inputs())).unwrap(), f.clone());
        if f.num_inputs() >= 2 {
            prop_assert_eq!(f.to_hex().parse::<TruthTable>().unwrap(), f);
        }
    }

    #[test]
    fn composition_law((f, t1, t2) in with_two(2..=8)) {
        let twice = f.apply(&t1).unwrap().apply(&t2).unwrap();
        prop_assert_eq!(f.apply(&t2.compose(&t1).unwrap()).unwrap(), twice);
        prop_assert!(t1.compose(&t1.invert()).unwrap().is_identity());
        prop_assert!(t1.invert().compose(&t1).unwrap().is_identity());
        prop_assert_eq!(f.apply(&t1).unwrap().apply(&t1.invert()).unwrap(), f);
    }

    #[test]
    fn cofactor_complement(f in table(1..=10)) {
        let s = cofactor_signature(&f);
        for i in 0..f.num_inputs() {
            let v = Var::new(i);
            prop_assert_eq!(s.per_var[i] + f.count_ones_with(v, false), s.total);
            prop_assert_eq!(f.cofactor(v, true).count_ones(), s.per_var[i]);
        }
    }

    #[test]
    fn output_negation_complements_count(f in table(1..=10)) {
        let g = f.apply(&NpnTransform::negation(f.num_inputs())).unwrap();
        prop_assert_eq!(g.count_ones() as usize, f.num_bits() - f.count_ones() as usize);
    }

    #[test]
    fn influence_ignores_phases_and_polarity((f, t) in with_transform(1..=10)) {
        let np = NpnTransform::new(t.out_neg(), t.phase(), &(0..f.num_inputs() as u8).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(influence_signature(&f.apply(&np).unwrap()), influence_signature(&f));
    }

    #[test]
    fn influence_follows_permutation((f, t) in with_transform(1..=10)) {
        let g = f.apply(&t).unwrap();
        let (a, b) = (influence_signature(&f), influence_signature(&g));
        for i in 0..f.num_inputs() {
            prop_assert_eq!(b.per_var[t.perm()[i] as usize], a.per_var[i]);
        }
    }

    #[test]
    fn influence_bounds(f in table(1..=10)) {
        let s = influence_signature(&f);
        for i in 0..f.num_inputs() {
            let inf = s.per_var[i];
            prop_assert!(inf as usize <= f.num_bits() / 2);
            prop_assert_eq!(inf % 2, f.count_ones() % 2);
            prop_assert_eq!(inf == 0, !f.depends_on(Var::new(i)));
        }
    }

    #[test]
    fn sers_ignores_permutation((f, t) in with_transform(1..=10)) {
        let perm = NpnTransform::permutation(t.perm()).unwrap();
        let g = f.apply(&perm).unwrap();
        prop_assert_eq!(sers::<u128>(&g, 3).unwrap(), sers::<u128>(&f, 3).unwrap());
        let (a, b) = (
            shifted_cofactor_signature::<u128>(&f, 5).unwrap(),
            shifted_cofactor_signature::<u128>(&g, 5).unwrap(),
        );
        for i in 0..f.num_inputs() {
            prop_assert_eq!(&b.order1[t.perm()[i] as usize], &a.order1[i]);
        }
    }

    #[test]
    fn canonical_form_is_class_invariant((f, t) in with_transform(1..=9)) {
        let g = f.apply(&t).unwrap();
        for m in [Method::Hybrid, Method::Optimized, Method::Baseline] {
            let a = canonicalize(&f, m).unwrap();
            let b = canonicalize(&g, m).unwrap();
            prop_assert_eq!(&a.canonical, &b.canonical);
            prop_assert_eq!(f.apply(&a.witness).unwrap(), a.canonical.clone());
            prop_assert_eq!(g.apply(&b.witness).unwrap(), b.canonical.clone());
            // Equal forms are linked by the composed witnesses.
            let link = b.witness.invert().compose(&a.witness).unwrap();
            prop_assert_eq!(f.apply(&link).unwrap(), g.clone());
            prop_assert!(monotone(&a.counters));
            prop_assert_eq!(canonicalize(&a.canonical, m).unwrap().canonical, a.canonical);
        }
    }

    #[test]
    fn exhaustive_agrees_with_pipeline((f, t) in with_transform(1..=5)) {
        let g = f.apply(&t).unwrap();
        let e = canonicalize(&f, Method::Exhaustive).unwrap();
        prop_assert_eq!(&canonicalize(&g, Method::Exhaustive).unwrap().canonical, &e.canonical);
        prop_assert_eq!(&canonicalize(&f, Method::Hybrid).unwrap().canonical, &e.canonical);
    }
}

#[test]
fn transforms_are_bijections_on_three_inputs() {
    let perm = [2u8, 0, 1];
    for t in [
        NpnTransform::new(true, 0b101, &perm).unwrap(),
        NpnTransform::new(false, 0b010, &[1, 0, 2]).unwrap(),
    ] {
        let mut seen = std::collections::HashSet::new();
        for w in 0..256 {
            assert!(seen.insert(TruthTable::from_u64(3, w).apply(&t).unwrap()));
        }
    }
}
