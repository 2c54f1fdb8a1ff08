// SPDX-License-Identifier: Apache-2.0

//! Brute-force NPN orbits, independent of any signature.

use crate::truth_table::{NpnTransform, TruthTable};

/// Every input permutation of `0..n`, as destination arrays.
pub fn permutations(n: usize) -> Vec<Vec<u8>> {
    fn rec(k: usize, p: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    let mut out = Vec::new();
    rec(0, &mut (0..n as u8).collect(), &mut out);
    out
}

/// All `2^(n+1) n!` transforms of `n` inputs.
pub fn all_transforms(n: usize) -> Vec<NpnTransform> {
    let mut out = Vec::new();
    for perm in permutations(n) {
        for phase in 0..1u32 << n {
            for o in [false, true] {
                out.push(NpnTransform::new(o, phase, &perm).expect("valid transform"));
            }
        }
    }
    out
}

/// Smallest table in the orbit of `f`.
pub fn orbit_min(f: &TruthTable, transforms: &[NpnTransform]) -> TruthTable {
    transforms
        .iter()
        .map(|t| f.apply(t).expect("transform sized for f"))
        .min()
        .expect("identity is always present")
}

/// Orbit index of every table of `n <= 4` inputs (indexed by its bits), in
/// order of each orbit's smallest member, and the orbit count.
pub fn orbit_ids(n: usize) -> (Vec<u32>, u32) {
    assert!(n <= 4, "orbit_ids enumerates all 2^(2^n) tables");
    let ts = all_transforms(n);
    let size = 1usize << (1 << n);
    let mut id = vec![u32::MAX; size];
    let mut next = 0;
    for w in 0..size as u64 {
        if id[w as usize] != u32::MAX {
            continue;
        }
        let f = TruthTable::from_u64(n, w);
        for t in &ts {
            id[f.apply(t).expect("sized").words()[0] as usize] = next;
        }
        next += 1;
    }
    (id, next)
}
