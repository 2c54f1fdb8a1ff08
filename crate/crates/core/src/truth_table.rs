// SPDX-License-Identifier: Apache-2.0

//! Packed truth tables and the NPN transformation group acting on them.
//!
//! Bit `m` of a table holds `f(X_m)` where the assignment `X_m` reads `m` in
//! binary with `x1` as the least-significant bit. Tables are stored as 64-bit
//! words; functions with fewer than six inputs occupy the low bits of a single
//! word and every bit above `2^n` is kept at zero.
//!
//! The hex rendering prints the most-significant minterm first, so `"8"` over
//! two inputs is `x1 & x2` and `"6"` is `x1 ^ x2`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Not};
use std::str::FromStr;

use smallvec::SmallVec;
use thiserror::Error;

/// Largest supported input count.
pub const MAX_INPUTS: usize = 16;

/// Minterms with `x_{i+1} = 1` inside a single 64-bit word, for `i < 6`.
pub(crate) const PROJ: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

type Words = SmallVec<[u64; 4]>;

/// Zero-based input variable index. Displayed one-based (`x1`, `x2`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u8);

impl Var {
    /// Variable from a zero-based index.
    pub fn new(index: usize) -> Self {
        assert!(index < MAX_INPUTS, "variable index {index} out of range");
        Var(index as u8)
    }

    /// Variable from a one-based index, `Var::x(1)` being `x1`.
    pub fn x(one_based: usize) -> Self {
        assert!(one_based >= 1, "one-based variable index must be >= 1");
        Var::new(one_based - 1)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0 + 1)
    }
}

/// Failure to read a truth table from text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseTableError {
    #[error("empty truth table")]
    Empty,
    #[error("invalid digit {ch:?} at position {pos}")]
    InvalidDigit { ch: char, pos: usize },
    #[error("{digits} hex digits is not a power-of-two bit count")]
    BadLength { digits: usize },
    #[error("truth table needs {inputs} inputs; at most {MAX_INPUTS} are supported")]
    TooManyInputs { inputs: usize },
    #[error("expected {expected} digits for {inputs} inputs, found {found}")]
    LengthMismatch {
        inputs: usize,
        expected: usize,
        found: usize,
    },
}

/// Complete truth table of an `n`-input, single-output Boolean function.
///
/// Zero-input tables are legal; they arise as cofactors of one-input functions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: u8,
    words: Words,
}

#[inline]
fn word_count(n: usize) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

#[inline]
fn word_mask(n: usize) -> u64 {
    if n >= 6 {
        !0
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

impl TruthTable {
    /// Constant-false function of `n` inputs.
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_INPUTS, "{n} inputs exceeds {MAX_INPUTS}");
        TruthTable {
            n: n as u8,
            words: SmallVec::from_elem(0, word_count(n)),
        }
    }

    /// Constant-true function of `n` inputs.
    pub fn one(n: usize) -> Self {
        !Self::zero(n)
    }

    /// The projection `x_v` over `n` inputs.
    pub fn var(n: usize, v: Var) -> Self {
        let i = v.index();
        assert!(i < n, "{v} out of range for {n} inputs");
        let mut t = Self::zero(n);
        if i < 6 {
            let m = PROJ[i] & word_mask(n);
            t.words.iter_mut().for_each(|w| *w = m);
        } else {
            for (k, w) in t.words.iter_mut().enumerate() {
                if (k >> (i - 6)) & 1 == 1 {
                    *w = !0;
                }
            }
        }
        t
    }

    /// Builds a table by evaluating `f` on every minterm index.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut t = Self::zero(n);
        for m in 0..(1usize << n) {
            if f(m) {
                t.words[m >> 6] |= 1 << (m & 63);
            }
        }
        t
    }

    /// Table of `n ≤ 6` inputs from the low `2^n` bits of `bits`.
    pub fn from_u64(n: usize, bits: u64) -> Self {
        assert!(n <= 6, "from_u64 takes at most 6 inputs");
        let mut t = Self::zero(n);
        t.words[0] = bits & word_mask(n);
        t
    }

    /// Table from packed words, least-significant minterms first. Bits past
    /// `2^n` are cleared.
    pub fn from_words(n: usize, words: &[u64]) -> Self {
        assert!(n <= MAX_INPUTS, "{n} inputs exceeds {MAX_INPUTS}");
        assert_eq!(words.len(), word_count(n), "word count for {n} inputs");
        let mut t = TruthTable {
            n: n as u8,
            words: SmallVec::from_slice(words),
        };
        t.words[0] &= word_mask(n);
        t
    }

    /// Parses the hex text format. See [`TruthTable::to_hex`].
    ///
    /// With `inputs` omitted the count is inferred from the digit count. Tables
    /// with fewer than two inputs are written in binary (`"10"` is `x1`) and need
    /// an explicit count.
    pub fn parse_hex(text: &str, inputs: Option<usize>) -> Result<Self, ParseTableError> {
        let s = text.trim();
        let s = s
            .strip_prefix("0x")
            .or_else(|| s.strip_prefix("0X"))
            .unwrap_or(s);
        if s.is_empty() {
            return Err(ParseTableError::Empty);
        }
        let n = match inputs {
            Some(n) if n > MAX_INPUTS => return Err(ParseTableError::TooManyInputs { inputs: n }),
            Some(n) if n < 2 => return Self::parse_binary(s, n),
            Some(n) => {
                let expected = 1usize << (n - 2);
                if s.len() != expected {
                    return Err(ParseTableError::LengthMismatch {
                        inputs: n,
                        expected,
                        found: s.len(),
                    });
                }
                n
            }
            None => {
                let digits = s.len();
                if !digits.is_power_of_two() {
                    return Err(ParseTableError::BadLength { digits });
                }
                let n = digits.trailing_zeros() as usize + 2;
                if n > MAX_INPUTS {
                    return Err(ParseTableError::TooManyInputs { inputs: n });
                }
                n
            }
        };
        let mut t = Self::zero(n);
        let len = s.len();
        for (pos, ch) in s.chars().enumerate() {
            let d = ch
                .to_digit(16)
                .ok_or(ParseTableError::InvalidDigit { ch, pos })? as u64;
            let r = len - 1 - pos;
            t.words[r / 16] |= d << ((r % 16) * 4);
        }
        Ok(t)
    }

    fn parse_binary(s: &str, n: usize) -> Result<Self, ParseTableError> {
        let expected = 1usize << n;
        if s.len() != expected {
            return Err(ParseTableError::LengthMismatch {
                inputs: n,
                expected,
                found: s.len(),
            });
        }
        let mut t = Self::zero(n);
        for (pos, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => t.words[0] |= 1 << (expected - 1 - pos),
                _ => return Err(ParseTableError::InvalidDigit { ch, pos }),
            }
        }
        Ok(t)
    }

    /// Uppercase hex, most-significant minterm first; binary below two inputs.
    pub fn to_hex(&self) -> String {
        let n = self.num_inputs();
        if n < 2 {
            let bits = 1usize << n;
            return (0..bits)
                .rev()
                .map(|m| if self.bit(m) { '1' } else { '0' })
                .collect();
        }
        let digits = 1usize << (n - 2);
        (0..digits)
            .rev()
            .map(|r| {
                let d = (self.words[r / 16] >> ((r % 16) * 4)) & 0xF;
                char::from_digit(d as u32, 16).unwrap().to_ascii_uppercase()
            })
            .collect()
    }

    #[inline]
    pub fn num_inputs(&self) -> usize {
        self.n as usize
    }

    /// Number of minterms, `2^n`.
    #[inline]
    pub fn num_bits(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn bit(&self, m: usize) -> bool {
        debug_assert!(m < self.num_bits());
        (self.words[m >> 6] >> (m & 63)) & 1 == 1
    }

    pub fn set_bit(&mut self, m: usize, value: bool) {
        assert!(m < self.num_bits(), "minterm {m} out of range");
        let b = 1u64 << (m & 63);
        if value {
            self.words[m >> 6] |= b;
        } else {
            self.words[m >> 6] &= !b;
        }
    }

    /// Satisfy count `|f|`.
    #[inline]
    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// `|f_{x_v}|` (or `|f_{!x_v}|` when `positive` is false) without building
    /// the cofactor.
    pub fn count_ones_with(&self, v: Var, positive: bool) -> u32 {
        let i = v.index();
        debug_assert!(i < self.num_inputs());
        if i < 6 {
            let m = if positive { PROJ[i] } else { !PROJ[i] };
            self.words.iter().map(|w| (w & m).count_ones()).sum()
        } else {
            let want = positive as usize;
            self.words
                .iter()
                .enumerate()
                .filter(|(k, _)| (k >> (i - 6)) & 1 == want)
                .map(|(_, w)| w.count_ones())
                .sum()
        }
    }

    /// `f_{x_v} != f_{!x_v}`.
    pub fn depends_on(&self, v: Var) -> bool {
        let i = v.index();
        debug_assert!(i < self.num_inputs());
        if i < 6 {
            let s = 1u32 << i;
            self.words.iter().any(|w| ((w >> s) ^ w) & !PROJ[i] != 0)
        } else {
            let stride = 1usize << (i - 6);
            (0..self.words.len())
                .filter(|k| k & stride == 0)
                .any(|k| self.words[k] != self.words[k | stride])
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// In place: `f(.., x_v, ..) -> f(.., !x_v, ..)`.
    pub fn flip_var(&mut self, v: Var) {
        let i = v.index();
        debug_assert!(i < self.num_inputs());
        if i < 6 {
            let s = 1u32 << i;
            for w in self.words.iter_mut() {
                *w = ((*w & PROJ[i]) >> s) | ((*w & !PROJ[i]) << s);
            }
        } else {
            let stride = 1usize << (i - 6);
            for k in 0..self.words.len() {
                if k & stride == 0 {
                    self.words.swap(k, k | stride);
                }
            }
        }
    }

    /// In place: exchanges the roles of `a` and `b`.
    pub fn swap_vars(&mut self, a: Var, b: Var) {
        let (lo, hi) = if a.index() < b.index() {
            (a.index(), b.index())
        } else {
            (b.index(), a.index())
        };
        debug_assert!(hi < self.num_inputs());
        if lo == hi {
            return;
        }
        if hi < 6 {
            // Delta swap: minterms with x_lo = 1, x_hi = 0 trade places with
            // x_lo = 0, x_hi = 1.
            let shift = (1u32 << hi) - (1u32 << lo);
            let mask = PROJ[lo] & !PROJ[hi];
            for w in self.words.iter_mut() {
                let t = (*w ^ (*w >> shift)) & mask;
                *w ^= t ^ (t << shift);
            }
        } else if lo < 6 {
            let s = 1u32 << lo;
            let stride = 1usize << (hi - 6);
            let low = !PROJ[lo];
            for k in 0..self.words.len() {
                if k & stride == 0 {
                    let (w0, w1) = (self.words[k], self.words[k | stride]);
                    let t = ((w0 >> s) ^ w1) & low;
                    self.words[k] = w0 ^ (t << s);
                    self.words[k | stride] = w1 ^ t;
                }
            }
        } else {
            let (sl, sh) = (1usize << (lo - 6), 1usize << (hi - 6));
            for k in 0..self.words.len() {
                if k & sl != 0 && k & sh == 0 {
                    self.words.swap(k, k ^ sl ^ sh);
                }
            }
        }
    }

    /// Cofactor with `v` fixed to `positive`. The result has `n - 1` inputs;
    /// variables above `v` shift down by one.
    pub fn cofactor(&self, v: Var, positive: bool) -> TruthTable {
        let n = self.num_inputs();
        assert!(v.index() < n, "{v} out of range for {n} inputs");
        let mut t = self.clone();
        // Bubble v to the top so the remaining variables keep their order.
        for j in v.index()..n - 1 {
            t.swap_vars(Var::new(j), Var::new(j + 1));
        }
        let m = n - 1;
        if m >= 6 {
            let half = word_count(m);
            let start = if positive { half } else { 0 };
            TruthTable::from_words(m, &t.words[start..start + half])
        } else {
            let w = t.words[0];
            let bits = if positive { w >> (1u32 << m) } else { w };
            TruthTable::from_u64(m, bits)
        }
    }

    /// Applies `t`; see [`NpnTransform`] for the action convention.
    pub fn apply(&self, t: &NpnTransform) -> Result<TruthTable, TransformError> {
        if t.num_inputs() != self.num_inputs() {
            return Err(TransformError::SizeMismatch {
                table: self.num_inputs(),
                transform: t.num_inputs(),
            });
        }
        let n = self.num_inputs();
        let mut h = self.clone();
        for i in 0..n {
            if t.phase_bit(i) {
                h.flip_var(Var::new(i));
            }
        }
        h.permute_in_place(t.perm());
        if t.out_neg() {
            h = !h;
        }
        Ok(h)
    }

    /// Moves variable `i` to position `dest[i]` using at most `n - 1` swaps.
    pub(crate) fn permute_in_place(&mut self, dest: &[u8]) {
        let n = dest.len();
        let mut at = [0u8; MAX_INPUTS];
        let mut loc = [0u8; MAX_INPUTS];
        let mut src = [0u8; MAX_INPUTS];
        for i in 0..n {
            at[i] = i as u8;
            loc[i] = i as u8;
            src[dest[i] as usize] = i as u8;
        }
        for j in 0..n {
            let v = src[j] as usize;
            let cur = loc[v] as usize;
            if cur != j {
                self.swap_vars(Var::new(j), Var::new(cur));
                let w = at[j] as usize;
                at[j] = v as u8;
                at[cur] = w as u8;
                loc[v] = j as u8;
                loc[w] = cur as u8;
            }
        }
    }

    fn cmp_bits(&self, other: &Self) -> Ordering {
        self.words.iter().rev().cmp(other.words.iter().rev())
    }
}

impl Ord for TruthTable {
    /// Input count first, then the table read as a number with the
    /// highest minterm most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.cmp_bits(other))
    }
}

impl PartialOrd for TruthTable {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({}; {})", self.n, self.to_hex())
    }
}

impl FromStr for TruthTable {
    type Err = ParseTableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TruthTable::parse_hex(s, None)
    }
}

impl Not for TruthTable {
    type Output = TruthTable;

    fn not(mut self) -> TruthTable {
        let mask = word_mask(self.num_inputs());
        for w in self.words.iter_mut() {
            *w = !*w & mask;
        }
        self
    }
}

macro_rules! bitop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for &TruthTable {
            type Output = TruthTable;

            fn $m(self, rhs: &TruthTable) -> TruthTable {
                assert_eq!(self.n, rhs.n, "input count mismatch");
                let mut out = self.clone();
                for (a, b) in out.words.iter_mut().zip(rhs.words.iter()) {
                    *a = *a $op *b;
                }
                out
            }
        }
    };
}

bitop!(BitAnd, bitand, &);
bitop!(BitOr, bitor, |);
bitop!(BitXor, bitxor, ^);

/// Errors from building or applying transforms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("transform over {transform} inputs applied to a {table}-input table")]
    SizeMismatch { table: usize, transform: usize },
    #[error("transforms over {0} and {1} inputs cannot be composed")]
    ComposeMismatch(usize, usize),
    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("phase mask {mask:#x} has bits above input {inputs}")]
    PhaseOutOfRange { mask: u32, inputs: usize },
    #[error("{0} inputs exceeds {MAX_INPUTS}")]
    TooManyInputs(usize),
}

/// An element of the NPN group: output polarity, input phase mask and input
/// permutation.
///
/// Acting on `f` it yields `g(x) = out_neg ^ f(y)` with
/// `y_i = x_{perm[i]} ^ phase_i`: input `i` of `f` is read from position
/// `perm[i]` of `g`, negated when phase bit `i` is set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NpnTransform {
    n: u8,
    out_neg: bool,
    phase: u16,
    perm: [u8; MAX_INPUTS],
}

impl NpnTransform {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_INPUTS);
        let mut perm = [0u8; MAX_INPUTS];
        for (i, p) in perm.iter_mut().enumerate().take(n) {
            *p = i as u8;
        }
        NpnTransform {
            n: n as u8,
            out_neg: false,
            phase: 0,
            perm,
        }
    }

    /// Validates `perm` (zero-based destinations) and `phase`.
    pub fn new(out_neg: bool, phase: u32, perm: &[u8]) -> Result<Self, TransformError> {
        let n = perm.len();
        if n > MAX_INPUTS {
            return Err(TransformError::TooManyInputs(n));
        }
        if n < 32 && phase >> n != 0 {
            return Err(TransformError::PhaseOutOfRange { mask: phase, inputs: n });
        }
        let mut seen = 0u32;
        for &p in perm {
            if p as usize >= n || seen & (1 << p) != 0 {
                return Err(TransformError::InvalidPermutation(n));
            }
            seen |= 1 << p;
        }
        let mut arr = [0u8; MAX_INPUTS];
        arr[..n].copy_from_slice(perm);
        Ok(NpnTransform {
            n: n as u8,
            out_neg,
            phase: phase as u16,
            perm: arr,
        })
    }

    /// Pure output negation.
    pub fn negation(n: usize) -> Self {
        NpnTransform {
            out_neg: true,
            ..Self::identity(n)
        }
    }

    /// Pure input negation.
    pub fn phase_only(n: usize, phase: u32) -> Result<Self, TransformError> {
        let id = Self::identity(n);
        Self::new(false, phase, id.perm())
    }

    /// Pure permutation.
    pub fn permutation(perm: &[u8]) -> Result<Self, TransformError> {
        Self::new(false, 0, perm)
    }

    /// Exchanges inputs `a` and `b`.
    pub fn swap(n: usize, a: Var, b: Var) -> Self {
        let mut t = Self::identity(n);
        t.perm.swap(a.index(), b.index());
        t
    }

    #[inline]
    pub fn num_inputs(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn out_neg(&self) -> bool {
        self.out_neg
    }

    #[inline]
    pub fn phase(&self) -> u32 {
        self.phase as u32
    }

    #[inline]
    pub fn phase_bit(&self, i: usize) -> bool {
        (self.phase >> i) & 1 == 1
    }

    /// `perm()[i]` is the position input `i` moves to.
    #[inline]
    pub fn perm(&self) -> &[u8] {
        &self.perm[..self.n as usize]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.num_inputs())
    }

    /// `self ∘ first`: applying the result equals applying `first`, then `self`.
    pub fn compose(&self, first: &NpnTransform) -> Result<NpnTransform, TransformError> {
        if self.n != first.n {
            return Err(TransformError::ComposeMismatch(
                self.num_inputs(),
                first.num_inputs(),
            ));
        }
        let n = self.num_inputs();
        let mut out = Self::identity(n);
        out.out_neg = self.out_neg ^ first.out_neg;
        let mut phase = 0u16;
        for i in 0..n {
            let mid = first.perm[i] as usize;
            out.perm[i] = self.perm[mid];
            let bit = first.phase_bit(i) ^ self.phase_bit(mid);
            phase |= (bit as u16) << i;
        }
        out.phase = phase;
        Ok(out)
    }

    pub fn invert(&self) -> NpnTransform {
        let n = self.num_inputs();
        let mut out = Self::identity(n);
        out.out_neg = self.out_neg;
        let mut phase = 0u16;
        for i in 0..n {
            let p = self.perm[i] as usize;
            out.perm[p] = i as u8;
            phase |= (self.phase_bit(i) as u16) << p;
        }
        out.phase = phase;
        out
    }

    /// One hex digit per input (x1 first) naming its zero-based destination.
    pub fn perm_string(&self) -> String {
        self.perm()
            .iter()
            .map(|&p| char::from_digit(p as u32, 16).unwrap().to_ascii_uppercase())
            .collect()
    }

    /// Phase mask as uppercase hex with at least one digit per four inputs.
    pub fn phase_string(&self) -> String {
        let width = self.num_inputs().div_ceil(4).max(1);
        format!("{:0width$X}", self.phase, width = width)
    }
}

impl fmt::Debug for NpnTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "NpnTransform(out_neg={}, phase={}, perm={})",
            self.out_neg as u8,
            self.phase_string(),
            self.perm_string()
        )
    }
}

impl fmt::Display for NpnTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}",
            self.out_neg as u8,
            self.phase_string(),
            self.perm_string()
        )
    }
}
