// SPDX-License-Identifier: Apache-2.0

//! Signature families used to prune NPN enumeration.
//!
//! All counts here are over minterms. A minterm's *weight* is the number of
//! inputs set to 1 in it. The row-sum based signatures (SSRS, SERS) are
//! functions of the weight histogram alone, which is why they ignore input
//! order.

use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, One, Zero};
use thiserror::Error;

use crate::truth_table::{TruthTable, Var, MAX_INPUTS, PROJ};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("exponential row-sum base must be at least 2, got {0}")]
    InvalidBase(u32),
    #[error("exponential row sum overflows the accumulator (base {base}, {inputs} inputs)")]
    Overflow { base: u32, inputs: usize },
}

/// Accumulator for exponential row sums. Anything with checked arithmetic
/// works: `u64`, `u128`, or an unbounded integer.
pub trait SersScalar: Clone + Ord + Zero + One + CheckedAdd + CheckedMul + FromPrimitive {}

impl<T> SersScalar for T where T: Clone + Ord + Zero + One + CheckedAdd + CheckedMul + FromPrimitive {}

/// `|f|` followed by `|f_{x_i}|` for every input.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CofactorSignature {
    pub total: u32,
    pub per_var: Vec<u32>,
}

impl CofactorSignature {
    /// `|f_{!x_i}|`.
    pub fn negative(&self, v: Var) -> u32 {
        self.total - self.per_var[v.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InfluenceSignature {
    pub per_var: Vec<u32>,
}

/// Zeroth and first order shifted-cofactor signatures.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShiftedCofactorSignature<A> {
    pub base: u32,
    pub order0: A,
    pub order1: Vec<A>,
}

/// Sorted weights of the satisfied minterms and their sum of squares.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RowSums {
    pub weights: Vec<u8>,
    pub ssrs: u64,
}

/// Number of permutations a final enumeration has to visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PermutationCost(pub u128);

pub fn cofactor_signature(f: &TruthTable) -> CofactorSignature {
    CofactorSignature {
        total: f.count_ones(),
        per_var: (0..f.num_inputs())
            .map(|i| f.count_ones_with(Var::new(i), true))
            .collect(),
    }
}

/// Number of input pairs along axis `v` on which `f` differs, i.e.
/// `|f_{x_v} ^ f_{!x_v}|` over the `2^(n-1)` cofactor positions.
pub fn influence(f: &TruthTable, v: Var) -> u32 {
    let i = v.index();
    assert!(i < f.num_inputs(), "{v} out of range");
    let words = f.words();
    if i < 6 {
        let s = 1u32 << i;
        let low = !PROJ[i];
        words
            .iter()
            .map(|w| ((w >> s) ^ w) & low)
            .map(u64::count_ones)
            .sum()
    } else {
        let stride = 1usize << (i - 6);
        (0..words.len())
            .filter(|k| k & stride == 0)
            .map(|k| (words[k] ^ words[k | stride]).count_ones())
            .sum()
    }
}

pub fn influence_signature(f: &TruthTable) -> InfluenceSignature {
    InfluenceSignature {
        per_var: (0..f.num_inputs()).map(|i| influence(f, Var::new(i))).collect(),
    }
}

/// Boolean difference along `v`: an `(n-1)`-input table, 1 wherever flipping
/// `x_v` flips `f`.
pub fn difference_table(f: &TruthTable, v: Var) -> TruthTable {
    &f.cofactor(v, true) ^ &f.cofactor(v, false)
}

const fn weight_masks() -> [u64; 7] {
    let mut masks = [0u64; 7];
    let mut b = 0;
    while b < 64 {
        masks[(b as u64).count_ones() as usize] |= 1 << b;
        b += 1;
    }
    masks
}

const WEIGHT_MASKS: [u64; 7] = weight_masks();

/// Satisfied minterms of `f` counted by weight, optionally restricted to
/// minterms with `x_v = 1`.
pub(crate) fn weight_histogram(f: &TruthTable, only: Option<Var>) -> [u32; MAX_INPUTS + 1] {
    let mut hist = [0u32; MAX_INPUTS + 1];
    let inner = f.num_inputs().min(6);
    for (k, &word) in f.words().iter().enumerate() {
        let w = match only {
            Some(v) if v.index() < 6 => word & PROJ[v.index()],
            Some(v) if (k >> (v.index() - 6)) & 1 == 0 => continue,
            _ => word,
        };
        if w == 0 {
            continue;
        }
        let outer = k.count_ones() as usize;
        for (j, mask) in WEIGHT_MASKS.iter().enumerate().take(inner + 1) {
            hist[outer + j] += (w & mask).count_ones();
        }
    }
    hist
}

pub fn row_sums(f: &TruthTable) -> RowSums {
    let hist = weight_histogram(f, None);
    let mut weights = Vec::with_capacity(f.count_ones() as usize);
    let mut ssrs = 0u64;
    for (w, &c) in hist.iter().enumerate() {
        weights.extend(std::iter::repeat_n(w as u8, c as usize));
        ssrs += c as u64 * (w * w) as u64;
    }
    RowSums { weights, ssrs }
}

/// `Σ hist[w] · base^(w - shift)`, skipping weights below `shift`.
fn exp_sum<A: SersScalar>(hist: &[u32], base: u32, shift: usize, n: usize) -> Result<A, SignatureError> {
    let overflow = || SignatureError::Overflow { base, inputs: n };
    let b = A::from_u32(base).ok_or_else(overflow)?;
    let mut acc = A::zero();
    let mut pow = A::one();
    for (w, &c) in hist.iter().enumerate().skip(shift) {
        if w > shift {
            pow = pow.checked_mul(&b).ok_or_else(overflow)?;
        }
        if c == 0 {
            continue;
        }
        let term = A::from_u32(c)
            .and_then(|c| c.checked_mul(&pow))
            .ok_or_else(overflow)?;
        acc = acc.checked_add(&term).ok_or_else(overflow)?;
    }
    Ok(acc)
}

fn check_base(base: u32) -> Result<(), SignatureError> {
    if base < 2 {
        Err(SignatureError::InvalidBase(base))
    } else {
        Ok(())
    }
}

/// Sum of exponential row sums, `Σ base^weight` over satisfied minterms.
pub fn sers<A: SersScalar>(f: &TruthTable, base: u32) -> Result<A, SignatureError> {
    check_base(base)?;
    exp_sum(&weight_histogram(f, None), base, 0, f.num_inputs())
}

/// SERS of the positive cofactor along `v`, read off `f` directly: the
/// cofactor drops `x_v = 1`, so every weight shifts down by one.
pub fn sers_of_positive_cofactor<A: SersScalar>(
    f: &TruthTable,
    v: Var,
    base: u32,
) -> Result<A, SignatureError> {
    check_base(base)?;
    exp_sum(&weight_histogram(f, Some(v)), base, 1, f.num_inputs())
}

pub fn shifted_cofactor_signature<A: SersScalar>(
    f: &TruthTable,
    base: u32,
) -> Result<ShiftedCofactorSignature<A>, SignatureError> {
    let order0 = sers(f, base)?;
    let order1 = (0..f.num_inputs())
        .map(|i| sers_of_positive_cofactor(f, Var::new(i), base))
        .collect::<Result<_, _>>()?;
    Ok(ShiftedCofactorSignature { base, order0, order1 })
}

pub(crate) fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// `Π size!` over the given group sizes.
pub fn permutation_cost(group_sizes: &[usize]) -> PermutationCost {
    PermutationCost(group_sizes.iter().map(|&s| factorial(s)).product())
}

/// Distinct orderings of a group whose members fall into classes of
/// interchangeable variables: `size! / Π class!`.
pub fn arrangement_cost(class_sizes: &[usize]) -> PermutationCost {
    let size: usize = class_sizes.iter().sum();
    PermutationCost(permutation_cost(&[size]).0 / permutation_cost(class_sizes).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt(hex: &str) -> TruthTable {
        hex.parse().unwrap()
    }

    #[test]
    fn cofactor_signature_examples() {
        let s = cofactor_signature(&tt("5DAE51AE5DA251A2"));
        assert_eq!(s.total, 32);
        assert_eq!(s.per_var, vec![16, 16, 16, 16, 18, 18]);
        let s = cofactor_signature(&tt("8"));
        assert_eq!((s.total, s.per_var.clone()), (1, vec![1, 1]));
        assert_eq!(s.negative(Var::x(1)), 0);
    }

    #[test]
    fn influence_examples() {
        let xor = tt("6");
        assert_eq!(influence_signature(&xor).per_var, vec![2, 2]);
        assert_eq!(influence_signature(&tt("8")).per_var, vec![1, 1]);
        assert_eq!(
            influence_signature(&tt("FFFF3777C8880000")).per_var,
            vec![6, 10, 2, 2, 10, 22]
        );
    }

    #[test]
    fn difference_examples() {
        let x1 = TruthTable::var(1, Var::x(1));
        assert_eq!(difference_table(&x1, Var::x(1)), TruthTable::one(0));
        let and = tt("8");
        assert_eq!(difference_table(&and, Var::x(1)), TruthTable::var(1, Var::x(1)));
    }

    #[test]
    fn difference_counts_axis_pairs() {
        let f = TruthTable::from_fn(5, |m| (m * 11 + 3) % 7 < 3);
        for i in 0..5 {
            let pairs = (0..32)
                .filter(|m| m >> i & 1 == 0)
                .filter(|&m| f.bit(m) != f.bit(m | 1 << i))
                .count() as u32;
            let v = Var::new(i);
            assert_eq!(difference_table(&f, v).count_ones(), pairs);
            assert_eq!(influence(&f, v), pairs);
        }
    }

    #[test]
    fn row_sum_examples() {
        let r = row_sums(&tt("8"));
        assert_eq!((r.weights, r.ssrs), (vec![2], 4));
        let r = row_sums(&tt("6"));
        assert_eq!((r.weights, r.ssrs), (vec![1, 1], 2));
        let r = row_sums(&TruthTable::one(2));
        assert_eq!((r.weights, r.ssrs), (vec![0, 1, 1, 2], 6));
    }

    #[test]
    fn sers_examples() {
        assert_eq!(sers::<u128>(&tt("8"), 3), Ok(9));
        assert_eq!(sers::<u128>(&tt("6"), 3), Ok(6));
        assert_eq!(sers::<u128>(&TruthTable::one(2), 3), Ok(16));
        assert_eq!(sers::<u64>(&tt("8"), 1), Err(SignatureError::InvalidBase(1)));
    }

    #[test]
    fn shifted_cofactor_examples() {
        let s = shifted_cofactor_signature::<u128>(&tt("8"), 3).unwrap();
        assert_eq!((s.order0, s.order1), (9, vec![3, 3]));
        let s = shifted_cofactor_signature::<u64>(&TruthTable::zero(5), 3).unwrap();
        assert_eq!((s.order0, s.order1), (0, vec![0; 5]));
    }

    #[test]
    fn order1_matches_built_cofactors() {
        let f = TruthTable::from_fn(8, |m| (m * 29 + (m >> 2)) % 5 < 2);
        let s = shifted_cofactor_signature::<u128>(&f, 3).unwrap();
        for i in 0..8 {
            let c = f.cofactor(Var::new(i), true);
            assert_eq!(s.order1[i], sers::<u128>(&c, 3).unwrap());
        }
    }

    #[test]
    fn overflow_is_reported() {
        let f = TruthTable::one(16);
        assert!(matches!(sers::<u64>(&f, 20), Err(SignatureError::Overflow { .. })));
        assert!(sers::<u128>(&f, 4).is_ok());
        assert_eq!(sers::<u128>(&f, 3), Ok(4u128.pow(16)));
    }

    #[test]
    fn unbounded_accumulator_agrees() {
        use num_bigint::BigUint;
        let f = TruthTable::from_fn(12, |m| m % 3 == 0);
        let wide: u128 = sers(&f, 4).unwrap();
        let big: BigUint = sers(&f, 4).unwrap();
        assert_eq!(BigUint::from(wide), big);
    }

    #[test]
    fn cost_examples() {
        assert_eq!(permutation_cost(&[1, 1, 1]), PermutationCost(1));
        assert_eq!(permutation_cost(&[3]), PermutationCost(6));
        assert_eq!(permutation_cost(&[2, 4]), PermutationCost(48));
        assert_eq!(arrangement_cost(&[2, 1]), PermutationCost(3));
        assert_eq!(arrangement_cost(&[1, 1, 1]), PermutationCost(6));
        assert_eq!(permutation_cost(&[16]), PermutationCost(20_922_789_888_000));
    }
}
