//! Subsets of a finite universe, the six set laws and set ring recognition.
//!
//! A subset is a bitmask over the universe order. Two law pairs make a family
//! a set ring: (Δ, ∩) and its dual (Θ, ∪), where Θ is the coincidence
//! A Θ B = complement(A Δ B). Each pair has two equivalent closure
//! conditions; the recognizer evaluates both and refuses to answer if they
//! ever disagree.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::b2::Bit;
use crate::carrier::SetLike;

/// Default bound on the universe size; exhaustive closure stays tractable.
pub const DEFAULT_UNIVERSE_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetRingError {
    #[error("universe label `{0}` appears twice")]
    DuplicateLabel(String),
    #[error("universe has {size} elements, above the cap of {cap}")]
    UniverseTooLarge { size: usize, cap: usize },
    #[error("unknown universe label `{0}`")]
    UnknownLabel(String),
    #[error("subsets over universes of different sizes ({0} vs {1})")]
    UniverseMismatch(usize, usize),
    #[error("mask {bits:#b} uses positions outside a universe of size {width}")]
    MaskOutOfRange { bits: u32, width: usize },
    #[error("operation `{0}` needs {1} operand(s)")]
    Arity(SetOp, usize),
    #[error("a set ring is a non-empty family of subsets")]
    EmptyFamily,
    #[error("family is not a set ring for {0}")]
    NotARing(LawPair),
    #[error("equivalent closure conditions disagree for {pair}: {detail}")]
    ConditionsDisagree { pair: LawPair, detail: String },
    #[error("unknown law pair `{0}` (expected delta-cap or theta-cup)")]
    UnknownLawPair(String),
    #[error("unknown set operation `{0}`")]
    UnknownOp(String),
}

/// The total set X: an ordered list of distinct labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteUniverse {
    labels: Vec<String>,
}

impl FiniteUniverse {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, SetRingError> {
        Self::with_cap(labels, DEFAULT_UNIVERSE_CAP)
    }

    pub fn with_cap<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        cap: usize,
    ) -> Result<Self, SetRingError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let cap = cap.min(32);
        if labels.len() > cap {
            return Err(SetRingError::UniverseTooLarge { size: labels.len(), cap });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(SetRingError::DuplicateLabel(l.clone()));
            }
        }
        Ok(FiniteUniverse { labels })
    }

    /// The universe {1, ..., n}.
    pub fn numbered(n: usize) -> Self {
        Self::new((1..=n).map(|i| i.to_string())).expect("numbered universe within cap")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize, SetRingError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| SetRingError::UnknownLabel(label.to_string()))
    }

    pub fn empty(&self) -> SubsetMask {
        SubsetMask { bits: 0, width: self.len() as u8 }
    }

    pub fn full(&self) -> SubsetMask {
        SubsetMask { bits: full_bits(self.len()), width: self.len() as u8 }
    }

    pub fn subset<'a>(
        &self,
        labels: impl IntoIterator<Item = &'a str>,
    ) -> Result<SubsetMask, SetRingError> {
        let mut bits = 0u32;
        for l in labels {
            bits |= 1 << self.index_of(l)?;
        }
        Ok(SubsetMask { bits, width: self.len() as u8 })
    }

    pub fn labels_of(&self, mask: SubsetMask) -> Vec<&str> {
        (0..self.len()).filter(|&i| mask.contains(i)).map(|i| self.labels[i].as_str()).collect()
    }

    /// Every subset, in increasing mask order.
    pub fn power_set(&self) -> Vec<SubsetMask> {
        let width = self.len() as u8;
        (0..=full_bits(self.len())).map(|bits| SubsetMask { bits, width }).collect()
    }

    /// `{a b}` style rendering, `{}` for the empty set.
    pub fn render(&self, mask: SubsetMask) -> String {
        format!("{{{}}}", self.labels_of(mask).join(" "))
    }
}

fn full_bits(width: usize) -> u32 {
    if width >= 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}

/// A subset of a finite universe as a bitmask over the universe order.
///
/// Ordering compares the mask value first, which is the canonical member
/// order of a [`SetRingFamily`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetMask {
    bits: u32,
    width: u8,
}

impl SubsetMask {
    pub fn new(bits: u32, width: usize) -> Result<Self, SetRingError> {
        if width > 32 || bits & !full_bits(width) != 0 {
            return Err(SetRingError::MaskOutOfRange { bits, width });
        }
        Ok(SubsetMask { bits, width: width as u8 })
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn contains(self, index: usize) -> bool {
        index < self.width() && self.bits >> index & 1 == 1
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    pub fn complement(self) -> SubsetMask {
        SubsetMask { bits: !self.bits & full_bits(self.width()), width: self.width }
    }

    fn with_bits(self, bits: u32) -> SubsetMask {
        SubsetMask { bits, width: self.width }
    }
}

/// The six set laws on 2^X.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetOp {
    Delta,
    Cap,
    Cup,
    Theta,
    Minus,
    Complement,
}

impl fmt::Display for SetOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetOp::Delta => "delta",
            SetOp::Cap => "cap",
            SetOp::Cup => "cup",
            SetOp::Theta => "theta",
            SetOp::Minus => "minus",
            SetOp::Complement => "complement",
        })
    }
}

impl FromStr for SetOp {
    type Err = SetRingError;
    fn from_str(s: &str) -> Result<Self, SetRingError> {
        Ok(match s {
            "delta" => SetOp::Delta,
            "cap" => SetOp::Cap,
            "cup" => SetOp::Cup,
            "theta" => SetOp::Theta,
            "minus" => SetOp::Minus,
            "complement" => SetOp::Complement,
            other => return Err(SetRingError::UnknownOp(other.to_string())),
        })
    }
}

pub fn set_op(op: SetOp, a: SubsetMask, b: Option<SubsetMask>) -> Result<SubsetMask, SetRingError> {
    if op == SetOp::Complement {
        return match b {
            None => Ok(a.complement()),
            Some(_) => Err(SetRingError::Arity(op, 1)),
        };
    }
    let b = b.ok_or(SetRingError::Arity(op, 2))?;
    if a.width != b.width {
        return Err(SetRingError::UniverseMismatch(a.width(), b.width()));
    }
    let full = full_bits(a.width());
    let bits = match op {
        SetOp::Delta => a.bits ^ b.bits,
        SetOp::Cap => a.bits & b.bits,
        SetOp::Cup => a.bits | b.bits,
        SetOp::Theta => !(a.bits ^ b.bits) & full,
        SetOp::Minus => a.bits & !b.bits,
        SetOp::Complement => unreachable!(),
    };
    Ok(a.with_bits(bits))
}

impl SetLike for SubsetMask {
    fn empty_like(&self) -> Self {
        self.with_bits(0)
    }
    fn is_empty(&self) -> bool {
        self.bits == 0
    }
    fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.width, other.width);
        self.with_bits(self.bits | other.bits)
    }
    fn intersection(&self, other: &Self) -> Self {
        debug_assert_eq!(self.width, other.width);
        self.with_bits(self.bits & other.bits)
    }
    fn difference(&self, other: &Self) -> Self {
        debug_assert_eq!(self.width, other.width);
        self.with_bits(self.bits & !other.bits)
    }
    fn sym_diff(&self, other: &Self) -> Self {
        debug_assert_eq!(self.width, other.width);
        self.with_bits(self.bits ^ other.bits)
    }
}

/// Which pair of laws a family is closed under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LawPair {
    /// (Δ, ∩); unit X when the family is a set algebra.
    DeltaCap,
    /// (Θ, ∪), the dual; unit ∅ when the family is a set algebra.
    ThetaCup,
}

impl LawPair {
    pub fn dual(self) -> LawPair {
        match self {
            LawPair::DeltaCap => LawPair::ThetaCup,
            LawPair::ThetaCup => LawPair::DeltaCap,
        }
    }
}

impl fmt::Display for LawPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LawPair::DeltaCap => "delta-cap",
            LawPair::ThetaCup => "theta-cup",
        })
    }
}

impl FromStr for LawPair {
    type Err = SetRingError;
    fn from_str(s: &str) -> Result<Self, SetRingError> {
        match s {
            "delta-cap" | "delta_cap" => Ok(LawPair::DeltaCap),
            "theta-cup" | "theta_cup" => Ok(LawPair::ThetaCup),
            other => Err(SetRingError::UnknownLawPair(other.to_string())),
        }
    }
}

type BinaryLaw = fn(u32, u32, u32) -> u32;

fn closed_under(members: &BTreeSet<u32>, full: u32, laws: [BinaryLaw; 2]) -> Option<(u32, u32)> {
    for &a in members {
        for &b in members {
            for law in laws {
                if !members.contains(&law(a, b, full)) {
                    return Some((a, b));
                }
            }
        }
    }
    None
}

fn cup(a: u32, b: u32, _: u32) -> u32 {
    a | b
}
fn minus(a: u32, b: u32, _: u32) -> u32 {
    a & !b
}
fn delta(a: u32, b: u32, _: u32) -> u32 {
    a ^ b
}
fn cap(a: u32, b: u32, _: u32) -> u32 {
    a & b
}
fn theta(a: u32, b: u32, full: u32) -> u32 {
    !(a ^ b) & full
}
/// Dual of A ∖ B under complementation: A ∪ complement(B).
fn co_minus(a: u32, b: u32, full: u32) -> u32 {
    (a | !b) & full
}

/// Result of evaluating both equivalent closure conditions for a law pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingVerdict {
    pub verdict: Bit,
    /// First pair violating the union/difference form of the condition.
    pub witness_first: Option<(SubsetMask, SubsetMask)>,
    /// First pair violating the Δ/∩ (resp. Θ/∪) form.
    pub witness_second: Option<(SubsetMask, SubsetMask)>,
}

/// Ring recognition with both equivalent conditions evaluated.
///
/// For (Δ, ∩): closure under {∪, ∖} and closure under {Δ, ∩}.
/// For (Θ, ∪): closure under {∩, A ∪ Bᶜ} and closure under {Θ, ∪}.
pub fn ring_verdict(
    universe: &FiniteUniverse,
    members: &[SubsetMask],
    law_pair: LawPair,
) -> Result<RingVerdict, SetRingError> {
    if members.is_empty() {
        return Err(SetRingError::EmptyFamily);
    }
    let width = universe.len();
    for m in members {
        if m.width() != width {
            return Err(SetRingError::UniverseMismatch(m.width(), width));
        }
    }
    let full = full_bits(width);
    let set: BTreeSet<u32> = members.iter().map(|m| m.bits).collect();
    let (first, second): ([BinaryLaw; 2], [BinaryLaw; 2]) = match law_pair {
        LawPair::DeltaCap => ([cup, minus], [delta, cap]),
        LawPair::ThetaCup => ([cap, co_minus], [theta, cup]),
    };
    let mk = |(a, b): (u32, u32)| (universe.empty().with_bits(a), universe.empty().with_bits(b));
    let w1 = closed_under(&set, full, first).map(mk);
    let w2 = closed_under(&set, full, second).map(mk);
    if w1.is_some() != w2.is_some() {
        return Err(SetRingError::ConditionsDisagree {
            pair: law_pair,
            detail: format!("first form witness {w1:?}, second form witness {w2:?}"),
        });
    }
    Ok(RingVerdict { verdict: Bit::from_bool(w1.is_none()), witness_first: w1, witness_second: w2 })
}

pub fn is_set_ring(
    universe: &FiniteUniverse,
    members: &[SubsetMask],
    law_pair: LawPair,
) -> Result<Bit, SetRingError> {
    ring_verdict(universe, members, law_pair).map(|v| v.verdict)
}

/// Set algebra test: X ∈ U for (Δ, ∩), ∅ ∈ U for (Θ, ∪).
pub fn is_set_algebra(
    universe: &FiniteUniverse,
    members: &[SubsetMask],
    law_pair: LawPair,
) -> Result<Bit, SetRingError> {
    if !is_set_ring(universe, members, law_pair)?.is_one() {
        return Err(SetRingError::NotARing(law_pair));
    }
    let unit = match law_pair {
        LawPair::DeltaCap => universe.full(),
        LawPair::ThetaCup => universe.empty(),
    };
    Ok(Bit::from_bool(members.contains(&unit)))
}

/// A family of subsets verified to be a set ring for its law pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetRingFamily {
    universe: FiniteUniverse,
    members: BTreeSet<SubsetMask>,
    law_pair: LawPair,
}

impl SetRingFamily {
    pub fn new(
        universe: FiniteUniverse,
        members: impl IntoIterator<Item = SubsetMask>,
        law_pair: LawPair,
    ) -> Result<Self, SetRingError> {
        let members: BTreeSet<SubsetMask> = members.into_iter().collect();
        let list: Vec<SubsetMask> = members.iter().copied().collect();
        if !is_set_ring(&universe, &list, law_pair)?.is_one() {
            return Err(SetRingError::NotARing(law_pair));
        }
        Ok(SetRingFamily { universe, members, law_pair })
    }

    /// The power set, a ring (indeed an algebra) for either pair.
    pub fn power_set(universe: FiniteUniverse, law_pair: LawPair) -> Self {
        let members = universe.power_set().into_iter().collect();
        SetRingFamily { universe, members, law_pair }
    }

    pub fn universe(&self) -> &FiniteUniverse {
        &self.universe
    }

    pub fn law_pair(&self) -> LawPair {
        self.law_pair
    }

    pub fn members(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: SubsetMask) -> bool {
        self.members.contains(&a)
    }

    pub fn is_algebra(&self) -> bool {
        let list: Vec<_> = self.members().collect();
        is_set_algebra(&self.universe, &list, self.law_pair).map(|b| b.is_one()).unwrap_or(false)
    }

    /// The ring unit: the reunion of all members for (Δ, ∩), the
    /// intersection of all members for (Θ, ∪). Finite rings always have one.
    pub fn unit(&self) -> SubsetMask {
        match self.law_pair {
            LawPair::DeltaCap => self.members().fold(self.universe.empty(), |u, a| u.union(&a)),
            LawPair::ThetaCup => {
                self.members().fold(self.universe.full(), |u, a| u.intersection(&a))
            }
        }
    }

    /// {Aᶜ : A ∈ U} with the dual law pair.
    pub fn complement_family(&self) -> SetRingFamily {
        SetRingFamily {
            universe: self.universe.clone(),
            members: self.members().map(SubsetMask::complement).collect(),
            law_pair: self.law_pair.dual(),
        }
    }
}

/// Least family containing `generators` and closed under the law pair.
pub fn generate_ring(
    universe: &FiniteUniverse,
    generators: &[SubsetMask],
    law_pair: LawPair,
) -> Result<SetRingFamily, SetRingError> {
    if generators.is_empty() {
        return Err(SetRingError::EmptyFamily);
    }
    let full = full_bits(universe.len());
    let laws: [BinaryLaw; 2] = match law_pair {
        LawPair::DeltaCap => [delta, cap],
        LawPair::ThetaCup => [theta, cup],
    };
    let mut members: BTreeSet<u32> = BTreeSet::new();
    let mut queue: Vec<u32> = Vec::new();
    for g in generators {
        if g.width() != universe.len() {
            return Err(SetRingError::UniverseMismatch(g.width(), universe.len()));
        }
        if members.insert(g.bits) {
            queue.push(g.bits);
        }
    }
    while let Some(x) = queue.pop() {
        let snapshot: Vec<u32> = members.iter().copied().collect();
        for y in snapshot {
            for law in laws {
                for z in [law(x, y, full), law(y, x, full)] {
                    if members.insert(z) {
                        queue.push(z);
                    }
                }
            }
        }
    }
    let width = universe.len();
    let masks = members.into_iter().map(|bits| SubsetMask { bits, width: width as u8 });
    SetRingFamily::new(universe.clone(), masks, law_pair)
}

/// χ_A as a pointwise table over the universe order.
pub fn char_function(a: SubsetMask) -> Vec<Bit> {
    (0..a.width()).map(|i| Bit::from_bool(a.contains(i))).collect()
}

/// supp f = {x : f(x) = 1}.
pub fn support(f: &[Bit]) -> Result<SubsetMask, SetRingError> {
    let bits = f.iter().enumerate().filter(|(_, b)| b.is_one()).fold(0u32, |m, (i, _)| m | 1 << i);
    SubsetMask::new(bits, f.len())
}
