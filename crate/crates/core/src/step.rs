//! Binary step functions R → B₂ and finitely supported point functions.

use std::fmt;

use crate::b2::{Bit, Law, parity};
use crate::carrier::{FiniteSet, SetLike};
use crate::interval::cancel_pairs;
use crate::rational::{ExtRational, Rational};

/// f(t) = v0 ⊕ π(|{s ∈ toggles : s < t}|).
///
/// Every such function is left continuous, with value v0 on (−∞, s₁] and
/// prolonged to ∞ by its eventual value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryStepFunction {
    v0: Bit,
    toggles: Vec<Rational>,
}

impl BinaryStepFunction {
    /// Sorts and cancels equal toggles in pairs.
    pub fn normalize(v0: Bit, raw_toggles: impl IntoIterator<Item = Rational>) -> Self {
        let mut toggles: Vec<Rational> = raw_toggles.into_iter().collect();
        toggles.sort();
        BinaryStepFunction { v0, toggles: cancel_pairs(toggles) }
    }

    pub fn zero() -> Self {
        BinaryStepFunction::default()
    }

    pub fn constant(v: Bit) -> Self {
        BinaryStepFunction { v0: v, toggles: Vec::new() }
    }

    /// Indicator of the left-open interval (a, b].
    pub fn indicator(a: Rational, b: Rational) -> Self {
        BinaryStepFunction::normalize(Bit::ZERO, [a, b])
    }

    pub fn v0(&self) -> Bit {
        self.v0
    }

    pub fn toggles(&self) -> &[Rational] {
        &self.toggles
    }

    /// Value at a finite point or at ±∞ (f(−∞) := v0).
    pub fn eval(&self, t: ExtRational) -> Bit {
        match t {
            ExtRational::NegInf => self.v0,
            ExtRational::PosInf => self.v0 ^ parity(self.toggles.len()),
            ExtRational::Finite(x) => self.at(x),
        }
    }

    pub fn at(&self, x: Rational) -> Bit {
        self.v0 ^ parity(self.toggles.partition_point(|s| *s < x))
    }

    /// f(t − 0). Counts toggles strictly below t, exactly as `eval` does,
    /// which is the left continuity of the class.
    pub fn left_limit(&self, t: ExtRational) -> Bit {
        match t {
            ExtRational::NegInf => self.v0,
            ExtRational::PosInf => self.v0 ^ parity(self.toggles.len()),
            ExtRational::Finite(x) => {
                let below = self.toggles.partition_point(|s| *s < x);
                self.v0 ^ parity(below)
            }
        }
    }

    /// Pointwise complement.
    pub fn complement(&self) -> Self {
        BinaryStepFunction { v0: !self.v0, toggles: self.toggles.clone() }
    }

    /// Pointwise combination under a binary law.
    pub fn combine(law: Law, f: &Self, g: &Self) -> Self {
        if law == Law::Xor {
            let mut all = f.toggles.clone();
            all.extend(g.toggles.iter().copied());
            return BinaryStepFunction::normalize(f.v0 ^ g.v0, all);
        }
        if law == Law::Not {
            return f.complement();
        }
        let mut breaks: Vec<Rational> = f.toggles.iter().chain(&g.toggles).copied().collect();
        breaks.sort();
        breaks.dedup();
        let v0 = law.apply(f.v0, g.v0);
        let mut current = v0;
        let mut toggles = Vec::new();
        for (i, &s) in breaks.iter().enumerate() {
            // value on (s, next]; left continuity makes next's value the piece value
            let piece = match breaks.get(i + 1) {
                Some(&next) => law.apply(f.at(next), g.at(next)),
                None => law.apply(f.eval(ExtRational::PosInf), g.eval(ExtRational::PosInf)),
            };
            if piece != current {
                toggles.push(s);
                current = piece;
            }
        }
        BinaryStepFunction { v0, toggles }
    }

    /// The support {f = 1} as left-open pieces (lo, hi]; lo may be −∞ and
    /// hi may be +∞ (in which case the piece is (lo, ∞)).
    pub fn support_pieces(&self) -> Vec<(ExtRational, ExtRational)> {
        let mut cuts: Vec<ExtRational> = Vec::with_capacity(self.toggles.len() + 2);
        cuts.push(ExtRational::NegInf);
        cuts.extend(self.toggles.iter().map(|&s| ExtRational::Finite(s)));
        cuts.push(ExtRational::PosInf);
        let mut out = Vec::new();
        let mut value = self.v0;
        for w in cuts.windows(2) {
            if value.is_one() {
                out.push((w[0], w[1]));
            }
            value = !value;
        }
        out
    }

    /// Support is bounded: zero near both ends.
    pub fn has_bounded_support(&self) -> bool {
        !self.v0.is_one() && !self.eval(ExtRational::PosInf).is_one()
    }
}

impl SetLike for BinaryStepFunction {
    fn empty_like(&self) -> Self {
        BinaryStepFunction::zero()
    }
    fn is_empty(&self) -> bool {
        !self.v0.is_one() && self.toggles.is_empty()
    }
    fn union(&self, other: &Self) -> Self {
        BinaryStepFunction::combine(Law::Or, self, other)
    }
    fn intersection(&self, other: &Self) -> Self {
        BinaryStepFunction::combine(Law::And, self, other)
    }
    fn difference(&self, other: &Self) -> Self {
        BinaryStepFunction::combine(Law::And, self, &other.complement())
    }
    fn sym_diff(&self, other: &Self) -> Self {
        BinaryStepFunction::combine(Law::Xor, self, other)
    }
}

impl fmt::Display for BinaryStepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "init={}; toggles=", self.v0)?;
        for (i, s) in self.toggles.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", ExtRational::Finite(*s))?;
        }
        Ok(())
    }
}

/// A point of Rⁿ with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(pub Vec<Rational>);

impl Point {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl From<Rational> for Point {
    fn from(x: Rational) -> Self {
        Point(vec![x])
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", ExtRational::Finite(self.0[0]));
        }
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", ExtRational::Finite(*x))?;
        }
        f.write_str(")")
    }
}

/// A function equal to 1 exactly on a finite set of points.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparsePointFunction<P: Ord> {
    support: FiniteSet<P>,
}

impl<P: Ord + Clone + fmt::Debug> SparsePointFunction<P> {
    pub fn new(points: impl IntoIterator<Item = P>) -> Self {
        SparsePointFunction { support: FiniteSet::new(points) }
    }

    pub fn from_support(support: FiniteSet<P>) -> Self {
        SparsePointFunction { support }
    }

    pub fn support(&self) -> &FiniteSet<P> {
        &self.support
    }

    pub fn eval(&self, p: &P) -> Bit {
        Bit::from_bool(self.support.contains(p))
    }

    /// Pointwise law; `or`, `and`, `xor` keep finite support.
    pub fn combine(law: Law, f: &Self, g: &Self) -> Option<Self> {
        let support = match law {
            Law::Or => f.support.union(&g.support),
            Law::And => f.support.intersection(&g.support),
            Law::Xor => f.support.sym_diff(&g.support),
            Law::Xnor | Law::Not => return None,
        };
        Some(SparsePointFunction { support })
    }
}

impl<P: Ord + fmt::Display> fmt::Display for SparsePointFunction<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("points=")?;
        for (i, p) in self.support.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
