//! Set carriers shared by the measures and checkers.

use std::collections::BTreeSet;
use std::fmt;

/// A family of sets closed under the Δ/∩ laws (and therefore ∪ and ∖).
///
/// Every implementation is a concrete ring: finite universe masks, interval
/// unions, box unions, eventually constant sequences and so on. Operands of a
/// binary operation are assumed to live in the same ring instance (same
/// universe width, same dimension); mixing them is a programming error.
pub trait SetLike: Clone + PartialEq + fmt::Debug {
    /// The empty set of the ring `self` belongs to.
    fn empty_like(&self) -> Self;
    fn is_empty(&self) -> bool;
    fn union(&self, other: &Self) -> Self;
    fn intersection(&self, other: &Self) -> Self;
    fn difference(&self, other: &Self) -> Self;
    fn sym_diff(&self, other: &Self) -> Self;

    fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    /// Point-set equality, independent of representation.
    fn same_set(&self, other: &Self) -> bool {
        self.sym_diff(other).is_empty()
    }
}

/// A finite set of points; the ring R_f(X) of finite subsets of X.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteSet<P: Ord>(pub BTreeSet<P>);

impl<P: Ord + Clone> FiniteSet<P> {
    pub fn new(points: impl IntoIterator<Item = P>) -> Self {
        FiniteSet(points.into_iter().collect())
    }

    pub fn empty() -> Self {
        FiniteSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, p: &P) -> bool {
        self.0.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &P> {
        self.0.iter()
    }

    pub fn filter(&self, mut keep: impl FnMut(&P) -> bool) -> Self {
        FiniteSet(self.0.iter().filter(|p| keep(p)).cloned().collect())
    }
}

impl<P: Ord + Clone + fmt::Debug> SetLike for FiniteSet<P> {
    fn empty_like(&self) -> Self {
        FiniteSet(BTreeSet::new())
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn union(&self, other: &Self) -> Self {
        FiniteSet(self.0.union(&other.0).cloned().collect())
    }

    fn intersection(&self, other: &Self) -> Self {
        FiniteSet(self.0.intersection(&other.0).cloned().collect())
    }

    fn difference(&self, other: &Self) -> Self {
        FiniteSet(self.0.difference(&other.0).cloned().collect())
    }

    fn sym_diff(&self, other: &Self) -> Self {
        FiniteSet(self.0.symmetric_difference(&other.0).cloned().collect())
    }
}

impl<P: Ord + Clone> FromIterator<P> for FiniteSet<P> {
    fn from_iter<I: IntoIterator<Item = P>>(iter: I) -> Self {
        FiniteSet(iter.into_iter().collect())
    }
}
