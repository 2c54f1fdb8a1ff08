// SPDX-License-Identifier: Apache-2.0

//! Exact NPN classification of Boolean functions of up to 16 inputs.
//!
//! ```
//! use npn::{canonicalize, Method, TruthTable};
//!
//! let and: TruthTable = "8".parse().unwrap();
//! let nor: TruthTable = "1".parse().unwrap();
//! let a = canonicalize(&and, Method::Hybrid).unwrap();
//! let b = canonicalize(&nor, Method::Hybrid).unwrap();
//! assert_eq!(a.canonical, b.canonical);
//! assert_eq!(and.apply(&a.witness).unwrap(), a.canonical);
//! ```

pub mod canonical;
pub mod classify;
pub mod ingest;
pub mod oracle;
pub mod signatures;
pub mod symmetry;
pub mod text;
pub mod truth_table;

pub use canonical::{
    canonicalize, canonicalize_with, signature_vector, stage_counters, variable_groups, CanonConfig,
    CanonError, CanonicalResult, ClassificationState, Method, SignatureVector, StageCounters,
    VectorKind,
};
pub use classify::{classify, classify_partitioned, grouping_histogram, ClassEntry, ClassMap, RunStats};
pub use signatures::{
    cofactor_signature, influence, influence_signature, permutation_cost, sers, CofactorSignature,
    InfluenceSignature, PermutationCost, SersScalar, SignatureError,
};
pub use symmetry::{detect_symmetry, is_symmetric, SymmetryClasses};
pub use truth_table::{NpnTransform, ParseTableError, TransformError, TruthTable, Var, MAX_INPUTS};

/// Shifted-cofactor signature at the width the canonical vector uses.
pub type ShiftedCofactor = signatures::ShiftedCofactorSignature<u128>;

/// Narrow variant. At base 3 the largest value is 4^16, so it never overflows.
pub type ShiftedCofactor64 = signatures::ShiftedCofactorSignature<u64>;
