// SPDX-License-Identifier: Apache-2.0

//! Pairwise (non-equivalence) variable symmetry.
//!
//! `x_i` and `x_j` are symmetric in `f` when swapping them leaves `f`
//! unchanged. Swaps that fix `f` form a group, so the relation is an
//! equivalence and a class is found by testing against one representative.

use crate::truth_table::{TruthTable, Var};

/// Partition of a variable group into classes of mutually symmetric inputs.
/// Classes keep the order in which their first member appears in the group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymmetryClasses {
    pub classes: Vec<Vec<Var>>,
}

impl SymmetryClasses {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

/// `f` is unchanged when `a` and `b` are exchanged; equivalently
/// `f_{x_a !x_b} == f_{!x_a x_b}`.
pub fn is_symmetric(f: &TruthTable, a: Var, b: Var) -> bool {
    if a == b {
        return true;
    }
    let mut g = f.clone();
    g.swap_vars(a, b);
    g == *f
}

pub fn detect_symmetry(f: &TruthTable, group: &[Var]) -> SymmetryClasses {
    let mut classes: Vec<Vec<Var>> = Vec::new();
    for &v in group {
        match classes.iter_mut().find(|c| is_symmetric(f, c[0], v)) {
            Some(c) => c.push(v),
            None => classes.push(vec![v]),
        }
    }
    SymmetryClasses { classes }
}
