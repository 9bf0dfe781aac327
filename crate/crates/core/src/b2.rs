//! The two-element Boole algebra B₂ = {0, 1}.
//!
//! Five laws act on bits: complement, reunion (OR), product (AND), the
//! modulo 2 sum (XOR) and coincidence (XNOR). Infinite families of bits only
//! enter through their finite support ([`FinitelySupportedBits`]) or finite
//! zero set ([`CofinitelySupportedBits`]), so the XOR and XNOR folds are total.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Not};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum B2Error {
    #[error("unknown law `{0}` (expected one of not, or, and, xor, xnor)")]
    UnknownLaw(String),
    #[error("law `{law}` takes {expected} operand(s)")]
    Arity { law: Law, expected: usize },
    #[error("{0} is not a bit; bits are 0 or 1")]
    NotABit(i64),
}

/// An element of B₂, stored as the integer 0 or 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bit(u8);

impl Bit {
    pub const ZERO: Bit = Bit(0);
    pub const ONE: Bit = Bit(1);

    pub fn new(value: i64) -> Result<Bit, B2Error> {
        match value {
            0 => Ok(Bit::ZERO),
            1 => Ok(Bit::ONE),
            other => Err(B2Error::NotABit(other)),
        }
    }

    pub fn from_bool(b: bool) -> Bit {
        Bit(b as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_one(self) -> bool {
        self.0 == 1
    }

    /// Coincidence ⊗: 1 exactly when both bits agree.
    pub fn xnor(self, other: Bit) -> Bit {
        Bit(1 ^ self.0 ^ other.0)
    }
}

impl Not for Bit {
    type Output = Bit;
    fn not(self) -> Bit {
        Bit(1 ^ self.0)
    }
}

impl BitOr for Bit {
    type Output = Bit;
    fn bitor(self, rhs: Bit) -> Bit {
        Bit(self.0 | rhs.0)
    }
}

impl BitAnd for Bit {
    type Output = Bit;
    fn bitand(self, rhs: Bit) -> Bit {
        Bit(self.0 & rhs.0)
    }
}

impl BitXor for Bit {
    type Output = Bit;
    fn bitxor(self, rhs: Bit) -> Bit {
        Bit(self.0 ^ rhs.0)
    }
}

impl std::ops::BitXorAssign for Bit {
    fn bitxor_assign(&mut self, rhs: Bit) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(if self.0 == 1 { "1" } else { "0" })
    }
}

impl FromIterator<Bit> for Bit {
    /// XOR of every bit in the iterator.
    fn from_iter<I: IntoIterator<Item = Bit>>(iter: I) -> Bit {
        iter.into_iter().fold(Bit::ZERO, |acc, b| acc ^ b)
    }
}

/// The parity function π: 1 iff `n` is odd.
pub fn parity(n: usize) -> Bit {
    Bit((n & 1) as u8)
}

/// The five laws of B₂, in the column order of the printed table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Law {
    Not,
    Or,
    And,
    Xor,
    Xnor,
}

impl Law {
    pub const ALL: [Law; 5] = [Law::Not, Law::Or, Law::And, Law::Xor, Law::Xnor];

    pub fn name(self) -> &'static str {
        match self {
            Law::Not => "not",
            Law::Or => "or",
            Law::And => "and",
            Law::Xor => "xor",
            Law::Xnor => "xnor",
        }
    }

    pub fn arity(self) -> usize {
        if self == Law::Not {
            1
        } else {
            2
        }
    }

    /// Applies a binary law. `Not` ignores `b`.
    pub fn apply(self, a: Bit, b: Bit) -> Bit {
        match self {
            Law::Not => !a,
            Law::Or => a | b,
            Law::And => a & b,
            Law::Xor => a ^ b,
            Law::Xnor => a.xnor(b),
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Law {
    type Err = B2Error;
    fn from_str(s: &str) -> Result<Law, B2Error> {
        Law::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| B2Error::UnknownLaw(s.to_string()))
    }
}

/// Evaluates one law; `not` takes exactly one operand, the others two.
pub fn b2_law(law: Law, a: Bit, b: Option<Bit>) -> Result<Bit, B2Error> {
    match (law.arity(), b) {
        (1, None) => Ok(!a),
        (2, Some(b)) => Ok(law.apply(a, b)),
        (expected, _) => Err(B2Error::Arity { law, expected }),
    }
}

/// A family (a_n) of bits with finitely many ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FinitelySupportedBits {
    ones: BTreeSet<u64>,
}

impl FinitelySupportedBits {
    pub fn new(ones: impl IntoIterator<Item = u64>) -> Self {
        FinitelySupportedBits { ones: ones.into_iter().collect() }
    }

    pub fn support(&self) -> &BTreeSet<u64> {
        &self.ones
    }

    pub fn get(&self, n: u64) -> Bit {
        Bit::from_bool(self.ones.contains(&n))
    }

    /// Summation modulo 2 over the whole family.
    pub fn xor_fold(&self) -> Bit {
        parity(self.ones.len())
    }
}

/// A family of bits with finitely many zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CofinitelySupportedBits {
    zeros: BTreeSet<u64>,
}

impl CofinitelySupportedBits {
    pub fn new(zeros: impl IntoIterator<Item = u64>) -> Self {
        CofinitelySupportedBits { zeros: zeros.into_iter().collect() }
    }

    pub fn zeros(&self) -> &BTreeSet<u64> {
        &self.zeros
    }

    pub fn get(&self, n: u64) -> Bit {
        Bit::from_bool(!self.zeros.contains(&n))
    }

    /// Coincidence fold over the whole family: 0 iff the zero count is odd.
    pub fn xnor_fold(&self) -> Bit {
        !parity(self.zeros.len())
    }
}

/// One row of the B₂ truth table: inputs `(a, b)` and the five law values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub a: Bit,
    pub b: Bit,
    pub values: [Bit; 5],
}

pub fn truth_table() -> Vec<TableRow> {
    let mut rows = Vec::with_capacity(4);
    for a in [Bit::ZERO, Bit::ONE] {
        for b in [Bit::ZERO, Bit::ONE] {
            let values = Law::ALL.map(|law| law.apply(a, b));
            rows.push(TableRow { a, b, values });
        }
    }
    rows
}

/// The table as printed by `b2 table`.
pub fn render_truth_table() -> String {
    let mut out = String::from("a b | not or and xor xnor\n");
    for row in truth_table() {
        let [n, o, a, x, c] = row.values;
        out.push_str(&format!(
            "{} {} | {:>3} {:>2} {:>3} {:>3} {:>4}\n",
            row.a, row.b, n, o, a, x, c
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bit(v: i64) -> Bit {
        Bit::new(v).unwrap()
    }

    #[test]
    fn table_examples() {
        assert_eq!(b2_law(Law::Xor, bit(1), Some(bit(1))).unwrap(), bit(0));
        assert_eq!(b2_law(Law::Xnor, bit(0), Some(bit(0))).unwrap(), bit(1));
        assert_eq!(b2_law(Law::Or, bit(0), Some(bit(0))).unwrap(), bit(0));
    }

    #[test]
    fn arity_and_names() {
        assert!(matches!(
            b2_law(Law::Not, bit(0), Some(bit(1))),
            Err(B2Error::Arity { expected: 1, .. })
        ));
        assert!(b2_law(Law::And, bit(0), None).is_err());
        assert_eq!("implies".parse::<Law>(), Err(B2Error::UnknownLaw("implies".into())));
        assert_eq!(Bit::new(2), Err(B2Error::NotABit(2)));
    }

    #[test]
    fn law_identities() {
        for a in [Bit::ZERO, Bit::ONE] {
            for b in [Bit::ZERO, Bit::ONE] {
                assert_eq!(a.xnor(b), !(a ^ b));
                assert_eq!(a & b, !(!a | !b));
            }
        }
    }

    // count-and-mod-2 oracle
    fn count_parity(ones: &[u64]) -> Bit {
        let mut distinct = ones.to_vec();
        distinct.sort();
        distinct.dedup();
        if distinct.len() % 2 == 1 {
            Bit::ONE
        } else {
            Bit::ZERO
        }
    }

    #[test]
    fn xor_fold_examples() {
        assert_eq!(FinitelySupportedBits::new([]).xor_fold(), Bit::ZERO);
        assert_eq!(FinitelySupportedBits::new([0, 3, 7]).xor_fold(), count_parity(&[0, 3, 7]));
        assert_eq!(FinitelySupportedBits::new([0, 3, 7]).xor_fold(), Bit::ONE);
        assert_eq!(FinitelySupportedBits::new([2, 5]).xor_fold(), Bit::ZERO);
    }

    #[test]
    fn xnor_fold_examples() {
        // duality oracle: xnor over z = not(xor over the complemented bits)
        let dual = |zeros: &[u64]| !FinitelySupportedBits::new(zeros.iter().copied()).xor_fold();
        assert_eq!(CofinitelySupportedBits::new([]).xnor_fold(), Bit::ONE);
        assert_eq!(CofinitelySupportedBits::new([1]).xnor_fold(), dual(&[1]));
        assert_eq!(CofinitelySupportedBits::new([1]).xnor_fold(), Bit::ZERO);
        assert_eq!(CofinitelySupportedBits::new([1, 2]).xnor_fold(), Bit::ONE);
    }

    #[test]
    fn xnor_chain_collapses_to_xor_plus_length_parity() {
        for k in 1..=8usize {
            for word in 0u32..(1 << k) {
                let bits: Vec<Bit> = (0..k).map(|i| Bit::from_bool(word >> i & 1 == 1)).collect();
                let chained = bits[1..].iter().fold(bits[0], |acc, &b| acc.xnor(b));
                let xor: Bit = bits.iter().copied().collect();
                assert_eq!(chained, xor ^ parity(k - 1), "k={k} word={word:b}");
            }
        }
    }

    #[test]
    fn rendered_table_has_four_rows() {
        let text = render_truth_table();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().nth(1).unwrap().starts_with("0 0 |   1  0   0   0    1"));
    }
}
