//! Binary set functions: additivity, additivity*, the identities every
//! additive function satisfies, and countable additivity checks.
//!
//! Finite rings are checked exhaustively. Infinite carriers are checked on
//! sampled pairs and on structured disjoint families that carry a tail
//! certificate; a passing run certifies the property relative to the
//! families supplied, it is not a proof.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::b2::Bit;
use crate::carrier::SetLike;
use crate::set_ring::{LawPair, SetOp, SetRingFamily, SubsetMask, set_op};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetFunctionError {
    #[error("set function needs a {expected} ring, got {found}")]
    WrongLawPair { expected: LawPair, found: LawPair },
    #[error("value table misses ring member {0}")]
    MissingValue(String),
    #[error("value given for {0}, which is not a ring member")]
    NotAMember(String),
    #[error("function is not additive: {0}")]
    NotAdditive(String),
    #[error("equivalent additivity conditions disagree: {0}")]
    ConditionsDisagree(String),
    #[error("family members {first} and {second} are not disjoint")]
    NotDisjoint { first: usize, second: usize },
    #[error("family member {0} is not contained in the declared union")]
    NotContained(usize),
    #[error("sequence is not {kind} at index {index}")]
    NotMonotone { kind: &'static str, index: usize },
    #[error("depth {depth} is below the tail certificate index {tail}")]
    DepthBelowCertificate { depth: usize, tail: usize },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Raised when a measure is evaluated outside its declared domain.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{measure} is not defined on {set}")]
pub struct DomainError {
    pub measure: String,
    pub set: String,
}

/// A binary set function on an infinite (or finite) carrier `S`.
pub trait Measure<S> {
    fn eval(&self, set: &S) -> Result<Bit, DomainError>;

    fn describe(&self) -> String {
        std::any::type_name::<Self>().rsplit("::").next().unwrap_or("measure").to_string()
    }
}

impl<S, M: Measure<S> + ?Sized> Measure<S> for &M {
    fn eval(&self, set: &S) -> Result<Bit, DomainError> {
        (**self).eval(set)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<S, M: Measure<S> + ?Sized> Measure<S> for Box<M> {
    fn eval(&self, set: &S) -> Result<Bit, DomainError> {
        (**self).eval(set)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// A measure given by a closure; handy for fixtures and duals.
pub struct FnMeasure<F> {
    name: String,
    f: F,
}

impl<F> FnMeasure<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnMeasure { name: name.into(), f }
    }
}

impl<S, F: Fn(&S) -> Bit> Measure<S> for FnMeasure<F> {
    fn eval(&self, set: &S) -> Result<Bit, DomainError> {
        Ok((self.f)(set))
    }
    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// μ: U → B₂ on a finite ring, given by its value table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabulatedSetFunction {
    ring: SetRingFamily,
    values: BTreeMap<SubsetMask, Bit>,
}

impl TabulatedSetFunction {
    pub fn new(
        ring: SetRingFamily,
        values: impl IntoIterator<Item = (SubsetMask, Bit)>,
    ) -> Result<Self, SetFunctionError> {
        let values: BTreeMap<SubsetMask, Bit> = values.into_iter().collect();
        for a in values.keys() {
            if !ring.contains(*a) {
                return Err(SetFunctionError::NotAMember(ring.universe().render(*a)));
            }
        }
        for a in ring.members() {
            if !values.contains_key(&a) {
                return Err(SetFunctionError::MissingValue(ring.universe().render(a)));
            }
        }
        Ok(TabulatedSetFunction { ring, values })
    }

    pub fn from_fn(ring: SetRingFamily, f: impl Fn(SubsetMask) -> Bit) -> Self {
        let values = ring.members().map(|a| (a, f(a))).collect();
        TabulatedSetFunction { ring, values }
    }

    pub fn ring(&self) -> &SetRingFamily {
        &self.ring
    }

    pub fn value(&self, a: SubsetMask) -> Option<Bit> {
        self.values.get(&a).copied()
    }

    pub fn values(&self) -> impl Iterator<Item = (SubsetMask, Bit)> + '_ {
        self.values.iter().map(|(a, b)| (*a, *b))
    }

    /// μ*(A) := not μ(Aᶜ) on the complement family with the dual law pair.
    pub fn complement_transport(&self) -> TabulatedSetFunction {
        let ring = self.ring.complement_family();
        let values = self.values.iter().map(|(a, b)| (a.complement(), !*b)).collect();
        TabulatedSetFunction { ring, values }
    }

    fn at(&self, a: SubsetMask) -> Bit {
        self.values[&a]
    }

    fn render(&self, a: SubsetMask) -> String {
        self.ring.universe().render(a)
    }
}

impl Measure<SubsetMask> for TabulatedSetFunction {
    fn eval(&self, set: &SubsetMask) -> Result<Bit, DomainError> {
        self.value(*set).ok_or_else(|| DomainError {
            measure: "tabulated set function".into(),
            set: self.render(*set),
        })
    }
    fn describe(&self) -> String {
        "tabulated set function".into()
    }
}

/// Verdicts of the two equivalent additivity conditions, with witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditivityReport {
    pub verdict: Bit,
    /// First pair breaking the disjoint-union (resp. covering-meet) form.
    pub pair_witness: Option<(SubsetMask, SubsetMask)>,
    /// First pair breaking the Δ (resp. Θ) form.
    pub law_witness: Option<(SubsetMask, SubsetMask)>,
}

fn require_pair(mu: &TabulatedSetFunction, expected: LawPair) -> Result<(), SetFunctionError> {
    let found = mu.ring.law_pair();
    if found != expected {
        return Err(SetFunctionError::WrongLawPair { expected, found });
    }
    Ok(())
}

fn agree(mu: &TabulatedSetFunction, report: AdditivityReport) -> Result<AdditivityReport, SetFunctionError> {
    if report.pair_witness.is_some() != report.law_witness.is_some() {
        let show = |w: Option<(SubsetMask, SubsetMask)>| {
            w.map(|(a, b)| format!("({}, {})", mu.render(a), mu.render(b))).unwrap_or("none".into())
        };
        return Err(SetFunctionError::ConditionsDisagree(format!(
            "pair form witness {}, law form witness {}",
            show(report.pair_witness),
            show(report.law_witness)
        )));
    }
    Ok(report)
}

/// Additivity on a (Δ, ∩) ring, evaluating both equivalent forms:
/// μ(A ∪ B) = μ(A) ⊕ μ(B) for disjoint A, B, and μ(A Δ B) = μ(A) ⊕ μ(B).
pub fn additivity_report(mu: &TabulatedSetFunction) -> Result<AdditivityReport, SetFunctionError> {
    require_pair(mu, LawPair::DeltaCap)?;
    let members: Vec<_> = mu.ring.members().collect();
    let mut pair_witness = None;
    let mut law_witness = None;
    for &a in &members {
        for &b in &members {
            if pair_witness.is_none() && a.is_disjoint(&b) && mu.at(a.union(&b)) != mu.at(a) ^ mu.at(b) {
                pair_witness = Some((a, b));
            }
            if law_witness.is_none() && mu.at(a.sym_diff(&b)) != mu.at(a) ^ mu.at(b) {
                law_witness = Some((a, b));
            }
        }
    }
    let verdict = Bit::from_bool(pair_witness.is_none());
    agree(mu, AdditivityReport { verdict, pair_witness, law_witness })
}

pub fn is_additive(mu: &TabulatedSetFunction) -> Result<Bit, SetFunctionError> {
    additivity_report(mu).map(|r| r.verdict)
}

/// Additivity* on a (Θ, ∪) ring: μ(A ∩ B) = μ(A) ⊗ μ(B) whenever A ∪ B = X,
/// cross-checked against μ(A Θ B) = μ(A) ⊗ μ(B).
pub fn additivity_star_report(mu: &TabulatedSetFunction) -> Result<AdditivityReport, SetFunctionError> {
    require_pair(mu, LawPair::ThetaCup)?;
    let full = mu.ring.universe().full();
    let members: Vec<_> = mu.ring.members().collect();
    let mut pair_witness = None;
    let mut law_witness = None;
    for &a in &members {
        for &b in &members {
            if pair_witness.is_none()
                && a.union(&b) == full
                && mu.at(a.intersection(&b)) != mu.at(a).xnor(mu.at(b))
            {
                pair_witness = Some((a, b));
            }
            let theta = set_op(SetOp::Theta, a, Some(b)).expect("same universe");
            if law_witness.is_none() && mu.at(theta) != mu.at(a).xnor(mu.at(b)) {
                law_witness = Some((a, b));
            }
        }
    }
    let verdict = Bit::from_bool(pair_witness.is_none());
    agree(mu, AdditivityReport { verdict, pair_witness, law_witness })
}

pub fn is_additive_star(mu: &TabulatedSetFunction) -> Result<Bit, SetFunctionError> {
    additivity_star_report(mu).map(|r| r.verdict)
}

/// The six identities of additive (items 1–3) and additive* (items 4–6)
/// functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AdditiveIdentity {
    /// μ(∅) = 0
    NullAtEmpty = 1,
    /// μ(A ∖ B) = μ(A) ⊕ μ(A ∩ B)
    Difference = 2,
    /// μ(A ∪ B) ⊕ μ(A ∩ B) ⊕ μ(A Δ B) = 0
    UnionMeetDelta = 3,
    /// μ(X) = 1
    FullAtTotal = 4,
    /// μ(A ∪ Bᶜ) = μ(A) ⊗ μ(A ∪ B)
    CoDifference = 5,
    /// μ(A ∩ B) ⊗ μ(A ∪ B) ⊗ μ(A Θ B) = 1
    MeetUnionTheta = 6,
}

impl AdditiveIdentity {
    pub fn number(self) -> u8 {
        self as u8
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub identity: AdditiveIdentity,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertiesReport {
    pub items: Vec<IdentityCheck>,
}

impl PropertiesReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

fn check_pairs(
    mu: &TabulatedSetFunction,
    identity: AdditiveIdentity,
    holds: impl Fn(SubsetMask, SubsetMask) -> bool,
) -> IdentityCheck {
    let members: Vec<_> = mu.ring.members().collect();
    for &a in &members {
        for &b in &members {
            if !holds(a, b) {
                return IdentityCheck {
                    identity,
                    passed: false,
                    witness: Some(format!("A={} B={}", mu.render(a), mu.render(b))),
                };
            }
        }
    }
    IdentityCheck { identity, passed: true, witness: None }
}

/// Checks items 1–3 for an additive μ on a (Δ, ∩) ring, or items 4–6 for an
/// additive* μ on a (Θ, ∪) ring.
pub fn additive_properties_report(mu: &TabulatedSetFunction) -> Result<PropertiesReport, SetFunctionError> {
    let universe = mu.ring.universe();
    let items = match mu.ring.law_pair() {
        LawPair::DeltaCap => {
            if !is_additive(mu)?.is_one() {
                return Err(SetFunctionError::NotAdditive("additivity fails".into()));
            }
            let empty = universe.empty();
            let null = match mu.value(empty) {
                Some(v) if v.is_one() => IdentityCheck {
                    identity: AdditiveIdentity::NullAtEmpty,
                    passed: false,
                    witness: Some("mu({}) = 1".into()),
                },
                _ => IdentityCheck { identity: AdditiveIdentity::NullAtEmpty, passed: true, witness: None },
            };
            vec![
                null,
                check_pairs(mu, AdditiveIdentity::Difference, |a, b| {
                    mu.at(a.difference(&b)) == mu.at(a) ^ mu.at(a.intersection(&b))
                }),
                check_pairs(mu, AdditiveIdentity::UnionMeetDelta, |a, b| {
                    (mu.at(a.union(&b)) ^ mu.at(a.intersection(&b)) ^ mu.at(a.sym_diff(&b))) == Bit::ZERO
                }),
            ]
        }
        LawPair::ThetaCup => {
            if !is_additive_star(mu)?.is_one() {
                return Err(SetFunctionError::NotAdditive("additivity* fails".into()));
            }
            let full = universe.full();
            let total = match mu.value(full) {
                Some(v) if !v.is_one() => IdentityCheck {
                    identity: AdditiveIdentity::FullAtTotal,
                    passed: false,
                    witness: Some("mu(X) = 0".into()),
                },
                _ => IdentityCheck { identity: AdditiveIdentity::FullAtTotal, passed: true, witness: None },
            };
            vec![
                total,
                check_pairs(mu, AdditiveIdentity::CoDifference, |a, b| {
                    mu.at(a.union(&b.complement())) == mu.at(a).xnor(mu.at(a.union(&b)))
                }),
                check_pairs(mu, AdditiveIdentity::MeetUnionTheta, |a, b| {
                    let theta = set_op(SetOp::Theta, a, Some(b)).expect("same universe");
                    mu.at(a.intersection(&b)).xnor(mu.at(a.union(&b))).xnor(mu.at(theta)) == Bit::ONE
                }),
            ]
        }
    };
    Ok(PropertiesReport { items })
}

/// Why the terms beyond a certain index contribute nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailReason {
    AllEmptyAfter,
    MeasureZeroAfter,
}

impl fmt::Display for TailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TailReason::AllEmptyAfter => "all empty after",
            TailReason::MeasureZeroAfter => "measure-0 after",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TailCertificate {
    pub index: usize,
    pub reason: TailReason,
}

type Producer<S> = Box<dyn Fn(usize) -> S + Send + Sync>;

/// A pairwise disjoint sequence (A_n) together with its union and a tail
/// certificate.
pub struct DisjointFamily<S> {
    pub label: String,
    produce: Producer<S>,
    pub union: S,
    pub tail: TailCertificate,
}

impl<S> DisjointFamily<S> {
    pub fn new(
        label: impl Into<String>,
        produce: impl Fn(usize) -> S + Send + Sync + 'static,
        union: S,
        tail: TailCertificate,
    ) -> Self {
        DisjointFamily { label: label.into(), produce: Box::new(produce), union, tail }
    }

    /// A finite family padded with empty sets after its last member.
    pub fn finite(label: impl Into<String>, members: Vec<S>, union: S) -> Self
    where
        S: SetLike + Send + Sync + 'static,
    {
        let n = members.len();
        let empty = union.empty_like();
        DisjointFamily::new(
            label,
            move |i| members.get(i).cloned().unwrap_or_else(|| empty.clone()),
            union,
            TailCertificate { index: n, reason: TailReason::AllEmptyAfter },
        )
    }

    pub fn member(&self, n: usize) -> S {
        (self.produce)(n)
    }
}

impl<S> fmt::Debug for DisjointFamily<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DisjointFamily").field("label", &self.label).field("tail", &self.tail).finish()
    }
}

/// Outcome of checking one disjoint family against the measure conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountableReport {
    pub finitely_many_ones: Bit,
    pub xor_equality: Bit,
    pub union_value: Bit,
    pub xor_sum: Bit,
    /// Indices n < depth with μ(A_n) = 1.
    pub ones: Vec<usize>,
    pub witness: Option<String>,
}

impl CountableReport {
    pub fn passes(&self) -> bool {
        self.finitely_many_ones.is_one() && self.xor_equality.is_one()
    }
}

/// Checks the countable additivity conditions on `fam` up to `depth`:
/// the set of n with μ(A_n) = 1 must stop before the certificate index, and
/// μ(∪ A_n) must equal the XOR of the observed values.
pub fn check_countable_family<S: SetLike, M: Measure<S> + ?Sized>(
    mu: &M,
    fam: &DisjointFamily<S>,
    depth: usize,
) -> Result<CountableReport, SetFunctionError> {
    if depth < fam.tail.index {
        return Err(SetFunctionError::DepthBelowCertificate { depth, tail: fam.tail.index });
    }
    let sets: Vec<S> = (0..depth).map(|n| fam.member(n)).collect();
    // A_j misses A_0 ∪ … ∪ A_{j−1} for every j iff the family is pairwise disjoint
    let mut seen: Option<S> = None;
    for (j, s) in sets.iter().enumerate() {
        if !s.is_subset(&fam.union) {
            return Err(SetFunctionError::NotContained(j));
        }
        if let Some(prev) = &seen {
            if !s.is_disjoint(prev) {
                let first = (0..j).find(|&i| !sets[i].is_disjoint(s)).expect("some earlier member meets A_j");
                return Err(SetFunctionError::NotDisjoint { first, second: j });
            }
        }
        seen = Some(match seen {
            Some(prev) => prev.union(s),
            None => s.clone(),
        });
    }
    let mut values = Vec::with_capacity(depth);
    for s in &sets {
        values.push(mu.eval(s)?);
    }
    let ones: Vec<usize> = values.iter().enumerate().filter(|(_, b)| b.is_one()).map(|(i, _)| i).collect();
    let mut witness = None;
    let late_one = ones.iter().find(|&&n| n >= fam.tail.index);
    let nonempty_tail = match fam.tail.reason {
        TailReason::AllEmptyAfter => (fam.tail.index..depth).find(|&n| !sets[n].is_empty()),
        TailReason::MeasureZeroAfter => None,
    };
    if let Some(n) = late_one {
        witness = Some(format!("mu(A_{n}) = 1 beyond the certificate index {}", fam.tail.index));
    } else if let Some(n) = nonempty_tail {
        witness = Some(format!("A_{n} is non-empty beyond the certificate index {}", fam.tail.index));
    }
    let finitely_many_ones = Bit::from_bool(witness.is_none());
    let xor_sum: Bit = values.iter().copied().collect();
    let union_value = mu.eval(&fam.union)?;
    let xor_equality = Bit::from_bool(union_value == xor_sum);
    if !xor_equality.is_one() && witness.is_none() {
        witness = Some(format!("mu(union) = {union_value} but XOR of mu(A_n) = {xor_sum}"));
    }
    Ok(CountableReport { finitely_many_ones, xor_equality, union_value, xor_sum, ones, witness })
}

/// A monotone sequence of sets with its limit (reunion or intersection) and
/// the index from which μ(A_n) is declared constant.
pub struct MonotoneSequence<S> {
    pub label: String,
    produce: Producer<S>,
    pub limit: S,
    pub stable_after: usize,
}

impl<S> MonotoneSequence<S> {
    pub fn new(
        label: impl Into<String>,
        produce: impl Fn(usize) -> S + Send + Sync + 'static,
        limit: S,
        stable_after: usize,
    ) -> Self {
        MonotoneSequence { label: label.into(), produce: Box::new(produce), limit, stable_after }
    }

    pub fn member(&self, n: usize) -> S {
        (self.produce)(n)
    }
}

impl<S> fmt::Debug for MonotoneSequence<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneSequence")
            .field("label", &self.label)
            .field("stable_after", &self.stable_after)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuityReport {
    /// μ(A_n) is constant from the declared index to the checked depth.
    pub convergent: Bit,
    pub limit_of_values: Option<Bit>,
    pub measure_of_limit: Bit,
    /// convergent and the limit of the bits equals μ(lim A_n).
    pub holds: Bit,
    pub values: Vec<Bit>,
    pub witness: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Ascending,
    Descending,
}

fn check_monotone<S: SetLike, M: Measure<S> + ?Sized>(
    mu: &M,
    seq: &MonotoneSequence<S>,
    depth: usize,
    kind: Monotonicity,
) -> Result<ContinuityReport, SetFunctionError> {
    let depth = depth.max(seq.stable_after + 1);
    let sets: Vec<S> = (0..depth).map(|n| seq.member(n)).collect();
    let name = match kind {
        Monotonicity::Ascending => "ascending",
        Monotonicity::Descending => "descending",
    };
    for n in 0..depth {
        if n + 1 < depth {
            let ok = match kind {
                Monotonicity::Ascending => sets[n].is_subset(&sets[n + 1]),
                Monotonicity::Descending => sets[n + 1].is_subset(&sets[n]),
            };
            if !ok {
                return Err(SetFunctionError::NotMonotone { kind: name, index: n });
            }
        }
        let ok = match kind {
            Monotonicity::Ascending => sets[n].is_subset(&seq.limit),
            Monotonicity::Descending => seq.limit.is_subset(&sets[n]),
        };
        if !ok {
            return Err(SetFunctionError::NotContained(n));
        }
    }
    let mut values = Vec::with_capacity(depth);
    for s in &sets {
        values.push(mu.eval(s)?);
    }
    let settled = values[seq.stable_after];
    let drift = (seq.stable_after..depth).find(|&n| values[n] != settled);
    let convergent = Bit::from_bool(drift.is_none());
    let measure_of_limit = mu.eval(&seq.limit)?;
    let limit_of_values = convergent.is_one().then_some(settled);
    let holds = Bit::from_bool(limit_of_values == Some(measure_of_limit));
    let witness = match (drift, holds.is_one()) {
        (Some(n), _) => Some(format!("mu(A_{n}) differs from mu(A_{}) after the declared index", seq.stable_after)),
        (None, false) => Some(format!("lim mu(A_n) = {settled} but mu(lim A_n) = {measure_of_limit}")),
        _ => None,
    };
    Ok(ContinuityReport { convergent, limit_of_values, measure_of_limit, holds, values, witness })
}

/// For an ascending (A_n) with reunion in the ring: μ(A_n) converges to μ(∪A_n).
pub fn check_ascending_continuity<S: SetLike, M: Measure<S> + ?Sized>(
    mu: &M,
    seq: &MonotoneSequence<S>,
    depth: usize,
) -> Result<ContinuityReport, SetFunctionError> {
    check_monotone(mu, seq, depth, Monotonicity::Ascending)
}

/// For a descending (A_n) with intersection in the ring: μ(A_n) converges to μ(∩A_n).
pub fn check_descending_continuity<S: SetLike, M: Measure<S> + ?Sized>(
    mu: &M,
    seq: &MonotoneSequence<S>,
    depth: usize,
) -> Result<ContinuityReport, SetFunctionError> {
    check_monotone(mu, seq, depth, Monotonicity::Descending)
}

/// Suite-relative measure certificate through monotone continuity: 1 iff every
/// sequence in the suite passes. A certificate relative to the suite only.
pub fn certify_measure_via_monotone<S: SetLike, M: Measure<S> + ?Sized>(
    mu: &M,
    strategy: Monotonicity,
    suite: &[MonotoneSequence<S>],
    depth: usize,
) -> Result<Bit, SetFunctionError> {
    for seq in suite {
        let report = check_monotone(mu, seq, depth, strategy)?;
        if !report.holds.is_one() {
            return Ok(Bit::ZERO);
        }
    }
    Ok(Bit::ONE)
}

/// Additivity on sampled pairs from an infinite carrier; returns the first
/// failing pair. Both the disjoint-union and the Δ form are evaluated.
pub fn sampled_additivity<S: SetLike, M: Measure<S> + ?Sized>(
    mu: &M,
    pairs: impl IntoIterator<Item = (S, S)>,
) -> Result<Option<(S, S)>, SetFunctionError> {
    for (a, b) in pairs {
        let (ma, mb) = (mu.eval(&a)?, mu.eval(&b)?);
        if mu.eval(&a.sym_diff(&b))? != ma ^ mb {
            return Ok(Some((a, b)));
        }
        if a.is_disjoint(&b) && mu.eval(&a.union(&b))? != ma ^ mb {
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::b2::parity;
    use crate::set_ring::FiniteUniverse;

    fn power(n: usize) -> SetRingFamily {
        SetRingFamily::power_set(FiniteUniverse::numbered(n), LawPair::DeltaCap)
    }

    #[test]
    fn additivity_examples() {
        let null = TabulatedSetFunction::from_fn(power(3), |_| Bit::ZERO);
        assert_eq!(is_additive(&null).unwrap(), Bit::ONE);

        let u = FiniteUniverse::new(["a", "b"]).unwrap();
        let dirac = TabulatedSetFunction::from_fn(SetRingFamily::power_set(u, LawPair::DeltaCap), |a| {
            Bit::from_bool(a.contains(0))
        });
        assert_eq!(is_additive(&dirac).unwrap(), Bit::ONE);

        let nonempty = TabulatedSetFunction::from_fn(power(2), |a| Bit::from_bool(!a.is_empty()));
        let report = additivity_report(&nonempty).unwrap();
        assert_eq!(report.verdict, Bit::ZERO);
        assert!(report.pair_witness.is_some() && report.law_witness.is_some());
    }

    #[test]
    fn additivity_star_examples() {
        let u = FiniteUniverse::new(["a", "b"]).unwrap();
        let dual_ring = SetRingFamily::power_set(u.clone(), LawPair::ThetaCup);
        let one = TabulatedSetFunction::from_fn(dual_ring, |_| Bit::ONE);
        assert_eq!(is_additive_star(&one).unwrap(), Bit::ONE);

        let dirac = TabulatedSetFunction::from_fn(SetRingFamily::power_set(u, LawPair::DeltaCap), |a| {
            Bit::from_bool(a.contains(0))
        });
        assert_eq!(is_additive_star(&dirac.complement_transport()).unwrap(), Bit::ONE);

        let nonempty = TabulatedSetFunction::from_fn(power(2), |a| Bit::from_bool(!a.is_empty()));
        assert_eq!(is_additive_star(&nonempty.complement_transport()).unwrap(), Bit::ZERO);
    }

    #[test]
    fn wrong_law_pair_is_rejected() {
        let mu = TabulatedSetFunction::from_fn(power(2), |_| Bit::ZERO);
        assert!(matches!(is_additive_star(&mu), Err(SetFunctionError::WrongLawPair { .. })));
        assert!(matches!(
            is_additive(&mu.complement_transport()),
            Err(SetFunctionError::WrongLawPair { .. })
        ));
    }

    #[test]
    fn value_table_must_match_ring() {
        let ring = power(1);
        let u = ring.universe().clone();
        assert!(matches!(
            TabulatedSetFunction::new(ring.clone(), [(u.empty(), Bit::ZERO)]),
            Err(SetFunctionError::MissingValue(_))
        ));
        let small = SetRingFamily::new(u.clone(), [u.empty()], LawPair::DeltaCap).unwrap();
        assert!(matches!(
            TabulatedSetFunction::new(small, [(u.empty(), Bit::ZERO), (u.full(), Bit::ONE)]),
            Err(SetFunctionError::NotAMember(_))
        ));
    }

    #[test]
    fn identities_examples() {
        let parity_mu = TabulatedSetFunction::from_fn(power(3), |a| parity(a.len()));
        let report = additive_properties_report(&parity_mu).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.items[0].identity, AdditiveIdentity::NullAtEmpty);

        let u = FiniteUniverse::new(["a", "b"]).unwrap();
        let dirac = TabulatedSetFunction::from_fn(SetRingFamily::power_set(u.clone(), LawPair::DeltaCap), |a| {
            Bit::from_bool(a.contains(0))
        });
        let a = u.full();
        let b = u.subset(["b"]).unwrap();
        assert_eq!(dirac.value(a.difference(&b)).unwrap(), Bit::ONE);
        assert_eq!(dirac.value(a).unwrap() ^ dirac.value(a.intersection(&b)).unwrap(), Bit::ONE);
        assert!(additive_properties_report(&dirac).unwrap().all_pass());

        let nonempty = TabulatedSetFunction::from_fn(power(2), |a| Bit::from_bool(!a.is_empty()));
        assert!(matches!(additive_properties_report(&nonempty), Err(SetFunctionError::NotAdditive(_))));
    }

    /// GF(2)-linear functionals on characteristic vectors of a 3-set.
    fn linear_functionals() -> Vec<Vec<Bit>> {
        (0u32..8)
            .map(|c| (0u32..8).map(|a| Bit::from_bool((a & c).count_ones() % 2 == 1)).collect())
            .collect()
    }

    #[test]
    fn exhaustive_three_point_additive_functions() {
        let ring = power(3);
        let masks: Vec<_> = ring.members().collect();
        let mut additive = Vec::new();
        for table in 0u32..256 {
            let mu = TabulatedSetFunction::from_fn(ring.clone(), |a| {
                Bit::from_bool(table >> a.bits() & 1 == 1)
            });
            if is_additive(&mu).unwrap().is_one() {
                let values: Vec<Bit> = masks.iter().map(|&a| mu.value(a).unwrap()).collect();
                additive.push(values);
                let report = additive_properties_report(&mu).unwrap();
                assert!(report.all_pass());
                let dual = mu.complement_transport();
                assert_eq!(is_additive_star(&dual).unwrap(), Bit::ONE);
                assert!(additive_properties_report(&dual).unwrap().all_pass());
            } else {
                assert_eq!(is_additive_star(&mu.complement_transport()).unwrap(), Bit::ZERO);
            }
        }
        let mut oracle = linear_functionals();
        oracle.sort();
        additive.sort();
        assert_eq!(additive, oracle);
    }

    #[test]
    fn finite_additive_functions_pass_every_disjoint_family() {
        let ring = power(3);
        let masks: Vec<SubsetMask> = ring.members().collect();
        for c in 0u32..8 {
            let mu = TabulatedSetFunction::from_fn(ring.clone(), |a| {
                Bit::from_bool((a.bits() & c).count_ones() % 2 == 1)
            });
            // every ordered family of pairwise disjoint non-empty sets: assign
            // each point to one of up to 3 blocks or to none
            for assign in 0..4u32.pow(3) {
                let mut blocks = [0u32; 3];
                for p in 0..3 {
                    let k = assign / 4u32.pow(p) % 4;
                    if k > 0 {
                        blocks[k as usize - 1] |= 1 << p;
                    }
                }
                let members: Vec<SubsetMask> = blocks.iter().map(|&b| masks[b as usize]).collect();
                let union = members.iter().fold(masks[0], |u, m| u.union(m));
                let fam = DisjointFamily::finite("blocks", members, union);
                let report = check_countable_family(&mu, &fam, 8).unwrap();
                assert!(report.passes(), "c={c} assign={assign}");
            }
        }
    }

    #[test]
    fn empty_family_is_trivially_countable() {
        let mu = TabulatedSetFunction::from_fn(power(2), |a| parity(a.len()));
        let empty = mu.ring().universe().empty();
        let fam = DisjointFamily::finite("empty", vec![], empty);
        let report = check_countable_family(&mu, &fam, 4).unwrap();
        assert_eq!((report.finitely_many_ones, report.xor_equality), (Bit::ONE, Bit::ONE));
        assert_eq!(report.union_value, Bit::ZERO);
    }

    #[test]
    fn singletons_family_on_parity() {
        let mu = TabulatedSetFunction::from_fn(power(3), |a| parity(a.len()));
        let u = mu.ring().universe().clone();
        let members = ["1", "2", "3"].map(|l| u.subset([l]).unwrap()).to_vec();
        let fam = DisjointFamily::finite("singletons", members, u.full());
        let report = check_countable_family(&mu, &fam, 3).unwrap();
        // 1 ⊕ 1 ⊕ 1 = 1 = π(3)
        assert_eq!((report.finitely_many_ones, report.xor_equality), (Bit::ONE, Bit::ONE));
        assert_eq!(report.ones, vec![0, 1, 2]);
    }

    #[test]
    fn overlapping_family_reports_the_pair() {
        let mu = TabulatedSetFunction::from_fn(power(2), |_| Bit::ZERO);
        let u = mu.ring().universe().clone();
        let fam = DisjointFamily::finite("overlap", vec![u.full(), u.subset(["1"]).unwrap()], u.full());
        assert_eq!(
            check_countable_family(&mu, &fam, 2),
            Err(SetFunctionError::NotDisjoint { first: 0, second: 1 })
        );
        assert!(matches!(
            check_countable_family(&mu, &fam, 1),
            Err(SetFunctionError::DepthBelowCertificate { .. })
        ));
    }

    #[test]
    fn exhaustive_descending_chains_on_three_points() {
        let ring = power(3);
        let masks: Vec<SubsetMask> = ring.members().collect();
        for c in 0u32..8 {
            let mu = TabulatedSetFunction::from_fn(ring.clone(), |a| {
                Bit::from_bool((a.bits() & c).count_ones() % 2 == 1)
            });
            // chains X ⊇ B ⊇ C for every pair of nested masks
            for &b in &masks {
                for &d in &masks {
                    if !d.is_subset(&b) {
                        continue;
                    }
                    let chain = [ring.universe().full(), b, d];
                    let seq = MonotoneSequence::new("chain", move |n| chain[n.min(2)], d, 2);
                    let r = check_descending_continuity(&mu, &seq, 6).unwrap();
                    assert_eq!(r.holds, Bit::ONE);
                    let asc = [d, b, ring.universe().full()];
                    let full = ring.universe().full();
                    let seq = MonotoneSequence::new("chain", move |n| asc[n.min(2)], full, 2);
                    assert_eq!(check_ascending_continuity(&mu, &seq, 6).unwrap().holds, Bit::ONE);
                }
            }
        }
    }

    #[test]
    fn non_monotone_sequence_is_diagnosed() {
        let mu = TabulatedSetFunction::from_fn(power(2), |_| Bit::ZERO);
        let u = mu.ring().universe().clone();
        let (a, b) = (u.subset(["1"]).unwrap(), u.subset(["2"]).unwrap());
        let full = u.full();
        let seq = MonotoneSequence::new("zigzag", move |n| if n % 2 == 0 { a } else { b }, full, 0);
        assert!(matches!(
            check_ascending_continuity(&mu, &seq, 4),
            Err(SetFunctionError::NotMonotone { kind: "ascending", index: 0 })
        ));
    }

    #[test]
    fn complement_transport_is_an_additivity_duality() {
        let ring = power(3);
        for table in 0u32..256 {
            let mu = TabulatedSetFunction::from_fn(ring.clone(), |a| Bit::from_bool(table >> a.bits() & 1 == 1));
            assert_eq!(is_additive(&mu).unwrap(), is_additive_star(&mu.complement_transport()).unwrap());
            assert_eq!(mu.complement_transport().complement_transport(), mu);
        }
    }
}
