//! Example binary measures on their natural carriers, behind one registry.
//!
//! Carriers: finite and cofinite point sets, eventually constant binary
//! sequences, symmetric-interval unions, left-continuous step functions and
//! the ring of bounded finite unions of intervals and points. Two of the
//! constructions are additive without being countably additive; their
//! divergent families are reproduced by [`counterexample_divergence`].

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::b2::{Bit, parity};
use crate::carrier::{FiniteSet, SetLike};
use crate::interval::{IntervalUnion, symmetric};
use crate::literal::{self, LiteralError};
use crate::ls::Chain;
use crate::rational::{ExtRational, Rational, abs, ceil_int, floor_int, midpoint, q, qi};
use crate::sample;
use crate::set_function::{
    CountableReport, DisjointFamily, DomainError, Measure, SetFunctionError, TailCertificate, TailReason,
    check_countable_family,
};
use crate::step::BinaryStepFunction;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown construction `{0}`; run `catalog list`")]
    UnknownConstruction(String),
    #[error("{name}: {message}")]
    BadParameters { name: String, message: String },
    #[error("malformed construction `{0}`: expected name(args)")]
    Malformed(String),
    #[error(transparent)]
    Literal(#[from] LiteralError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    SetFunction(#[from] SetFunctionError),
}

/// An eventually constant binary sequence, stored as its limit and the
/// finite set of indices where it differs from the limit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinarySequence {
    tail: Bit,
    flips: BTreeSet<u64>,
}

impl BinarySequence {
    /// Later assignments win; assignments equal to the tail are dropped.
    pub fn new(overrides: impl IntoIterator<Item = (u64, Bit)>, tail: Bit) -> Self {
        let mut flips = BTreeSet::new();
        for (n, b) in overrides {
            if b == tail {
                flips.remove(&n);
            } else {
                flips.insert(n);
            }
        }
        BinarySequence { tail, flips }
    }

    pub fn from_flips(tail: Bit, flips: impl IntoIterator<Item = u64>) -> Self {
        BinarySequence { tail, flips: flips.into_iter().collect() }
    }

    pub fn constant(b: Bit) -> Self {
        BinarySequence { tail: b, flips: BTreeSet::new() }
    }

    /// e⁽ⁿ⁾: 1 at position n, 0 elsewhere.
    pub fn basis(n: u64) -> Self {
        BinarySequence::from_flips(Bit::ZERO, [n])
    }

    pub fn get(&self, n: u64) -> Bit {
        self.tail ^ Bit::from_bool(self.flips.contains(&n))
    }

    /// The limit, which is the tail value.
    pub fn tail(&self) -> Bit {
        self.tail
    }

    pub fn flips(&self) -> &BTreeSet<u64> {
        &self.flips
    }

    fn zip(&self, other: &Self, law: impl Fn(Bit, Bit) -> Bit) -> Self {
        let tail = law(self.tail, other.tail);
        let overrides: Vec<(u64, Bit)> = self
            .flips
            .union(&other.flips)
            .map(|&n| (n, law(self.get(n), other.get(n))))
            .collect();
        BinarySequence::new(overrides, tail)
    }
}

impl SetLike for BinarySequence {
    fn empty_like(&self) -> Self {
        BinarySequence::default()
    }
    fn is_empty(&self) -> bool {
        !self.tail.is_one() && self.flips.is_empty()
    }
    fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }
    fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }
    fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }
    fn sym_diff(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a ^ b)
    }
}

impl fmt::Display for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seq tail={} flips=", self.tail)?;
        write_list(f, self.flips.iter())
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: impl Iterator<Item = T>) -> fmt::Result {
    for (i, x) in items.enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// A subset of the rationals with finite complement.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CofiniteSet {
    missing: FiniteSet<Rational>,
}

impl CofiniteSet {
    pub fn new(missing: impl IntoIterator<Item = Rational>) -> Self {
        CofiniteSet { missing: FiniteSet::new(missing) }
    }

    pub fn full() -> Self {
        CofiniteSet::default()
    }

    pub fn missing(&self) -> &FiniteSet<Rational> {
        &self.missing
    }

    pub fn contains(&self, x: &Rational) -> bool {
        !self.missing.contains(x)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        CofiniteSet { missing: self.missing.union(&other.missing) }
    }

    pub fn union(&self, other: &Self) -> Self {
        CofiniteSet { missing: self.missing.intersection(&other.missing) }
    }

    /// A Θ B = complement of A Δ B, again cofinite.
    pub fn theta(&self, other: &Self) -> Self {
        CofiniteSet { missing: self.missing.sym_diff(&other.missing) }
    }
}

impl fmt::Display for CofiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("cofinite missing=")?;
        write_list(f, self.missing.iter().map(|x| ExtRational::Finite(*x)))
    }
}

/// One breakpoint of an [`ElementarySet`]: whether the point itself belongs
/// and whether the open gap up to the next breakpoint belongs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Break {
    pub at: Rational,
    pub point_in: bool,
    pub gap_after_in: bool,
}

/// A bounded finite union of intervals (of any type) and points of R,
/// equivalently (a₁,b₁) Δ … Δ (a_p,b_p) Δ {c₁,…,c_n}.
///
/// Canonical form keeps only breakpoints where membership changes; the gap
/// after the last breakpoint is always outside.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementarySet {
    breaks: Vec<Break>,
}

impl ElementarySet {
    pub fn empty() -> Self {
        ElementarySet::default()
    }

    /// (a, b); empty when a = b, endpoints reordered when a > b.
    pub fn open(a: Rational, b: Rational) -> Self {
        match symmetric(a.into(), b.into()) {
            Some((ExtRational::Finite(lo), ExtRational::Finite(hi))) => ElementarySet {
                breaks: vec![
                    Break { at: lo, point_in: false, gap_after_in: true },
                    Break { at: hi, point_in: false, gap_after_in: false },
                ],
            },
            _ => ElementarySet::empty(),
        }
    }

    pub fn point(c: Rational) -> Self {
        ElementarySet { breaks: vec![Break { at: c, point_in: true, gap_after_in: false }] }
    }

    /// [a, b) for a < b.
    pub fn left_closed(a: Rational, b: Rational) -> Self {
        ElementarySet::open(a, b).sym_diff(&ElementarySet::point(a.min(b)))
    }

    /// The Δ-combination of open intervals and points.
    pub fn from_parts(opens: &[(Rational, Rational)], points: &[Rational]) -> Self {
        let mut acc = ElementarySet::empty();
        for &(a, b) in opens {
            acc = acc.sym_diff(&ElementarySet::open(a, b));
        }
        for &c in points {
            acc = acc.sym_diff(&ElementarySet::point(c));
        }
        acc
    }

    pub fn breaks(&self) -> &[Break] {
        &self.breaks
    }

    pub fn member(&self, x: Rational) -> bool {
        let i = self.breaks.partition_point(|b| b.at <= x);
        if i == 0 {
            return false;
        }
        let b = &self.breaks[i - 1];
        if b.at == x { b.point_in } else { b.gap_after_in }
    }

    /// Whether the open gap starting at breakpoint `x` (up to the next
    /// breakpoint of some refinement) lies in the set.
    fn gap_member(&self, x: Rational) -> bool {
        let i = self.breaks.partition_point(|b| b.at <= x);
        i > 0 && self.breaks[i - 1].gap_after_in
    }

    fn canonical(mut breaks: Vec<Break>) -> Self {
        let mut out: Vec<Break> = Vec::with_capacity(breaks.len());
        if let Some(last) = breaks.last_mut() {
            last.gap_after_in = false;
        }
        for b in breaks {
            let before = out.last().map(|p| p.gap_after_in).unwrap_or(false);
            if b.point_in == before && b.gap_after_in == before {
                continue;
            }
            out.push(b);
        }
        ElementarySet { breaks: out }
    }

    fn sweep(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let mut ats: Vec<Rational> = self.breaks.iter().chain(&other.breaks).map(|b| b.at).collect();
        ats.sort();
        ats.dedup();
        let breaks = ats
            .into_iter()
            .map(|x| Break {
                at: x,
                point_in: op(self.member(x), other.member(x)),
                gap_after_in: op(self.gap_member(x), other.gap_member(x)),
            })
            .collect();
        ElementarySet::canonical(breaks)
    }

    /// π(p + n) for any Δ-representation; on the canonical form this is the
    /// parity of the member breakpoints plus the member gaps.
    pub fn parity_measure(&self) -> Bit {
        let count = self.breaks.iter().map(|b| b.point_in as usize + b.gap_after_in as usize).sum();
        parity(count)
    }

    /// A Δ-representation with maximal open runs, as printed in literals.
    pub fn parts(&self) -> (Vec<(Rational, Rational)>, Vec<Rational>) {
        let mut opens = Vec::new();
        let mut points = Vec::new();
        let mut run: Option<Rational> = None;
        for b in &self.breaks {
            match run {
                Some(_) if b.point_in && b.gap_after_in => {}
                Some(start) => {
                    opens.push((start, b.at));
                    run = None;
                    if b.point_in {
                        points.push(b.at);
                    }
                    if b.gap_after_in {
                        run = Some(b.at);
                    }
                }
                None => {
                    if b.point_in {
                        points.push(b.at);
                    }
                    if b.gap_after_in {
                        run = Some(b.at);
                    }
                }
            }
        }
        (opens, points)
    }
}

impl SetLike for ElementarySet {
    fn empty_like(&self) -> Self {
        ElementarySet::empty()
    }
    fn is_empty(&self) -> bool {
        self.breaks.is_empty()
    }
    fn union(&self, other: &Self) -> Self {
        self.sweep(other, |a, b| a || b)
    }
    fn intersection(&self, other: &Self) -> Self {
        self.sweep(other, |a, b| a && b)
    }
    fn difference(&self, other: &Self) -> Self {
        self.sweep(other, |a, b| a && !b)
    }
    fn sym_diff(&self, other: &Self) -> Self {
        self.sweep(other, |a, b| a ^ b)
    }
}

impl fmt::Display for ElementarySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (opens, points) = self.parts();
        f.write_str("sring open=")?;
        write_list(
            f,
            opens.iter().map(|(a, b)| format!("({},{})", ExtRational::Finite(*a), ExtRational::Finite(*b))),
        )?;
        f.write_str(" points=")?;
        write_list(f, points.iter().map(|x| ExtRational::Finite(*x)))
    }
}

/// An element of one of the catalog carriers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetValue {
    /// Finite point set, also read as a finitely supported function.
    Points(FiniteSet<Rational>),
    Cofinite(CofiniteSet),
    Intervals(IntervalUnion),
    Sequence(BinarySequence),
    /// Left-continuous step function, read through its support.
    Step(BinaryStepFunction),
    Elementary(ElementarySet),
}

impl SetValue {
    pub fn kind(&self) -> &'static str {
        match self {
            SetValue::Points(_) => "finite point set",
            SetValue::Cofinite(_) => "cofinite set",
            SetValue::Intervals(_) => "interval union",
            SetValue::Sequence(_) => "binary sequence",
            SetValue::Step(_) => "step function",
            SetValue::Elementary(_) => "interval-and-point set",
        }
    }

    /// Point membership where the carrier lives on the rationals.
    pub fn contains_point(&self, x: Rational) -> Option<bool> {
        Some(match self {
            SetValue::Points(p) => p.contains(&x),
            SetValue::Cofinite(c) => c.contains(&x),
            SetValue::Intervals(u) => u.member(x).is_one(),
            SetValue::Step(f) => f.at(x).is_one(),
            SetValue::Elementary(e) => e.member(x),
            SetValue::Sequence(s) => {
                if *x.denom() != 1 || *x.numer() < 0 {
                    return Some(false);
                }
                s.get(*x.numer() as u64).is_one()
            }
        })
    }
}

impl fmt::Display for SetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetValue::Points(p) => {
                f.write_str("points=")?;
                write_list(f, p.iter().map(|x| ExtRational::Finite(*x)))
            }
            SetValue::Cofinite(c) => c.fmt(f),
            SetValue::Intervals(u) => u.fmt(f),
            SetValue::Sequence(s) => s.fmt(f),
            SetValue::Step(s) => s.fmt(f),
            SetValue::Elementary(e) => e.fmt(f),
        }
    }
}

fn mismatch(a: &SetValue, b: &SetValue) -> ! {
    panic!("set operation across carriers: {} and {}", a.kind(), b.kind())
}

impl SetLike for SetValue {
    fn empty_like(&self) -> Self {
        match self {
            SetValue::Points(_) | SetValue::Cofinite(_) => SetValue::Points(FiniteSet::empty()),
            SetValue::Intervals(_) => SetValue::Intervals(IntervalUnion::empty()),
            SetValue::Sequence(_) => SetValue::Sequence(BinarySequence::default()),
            SetValue::Step(_) => SetValue::Step(BinaryStepFunction::zero()),
            SetValue::Elementary(_) => SetValue::Elementary(ElementarySet::empty()),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            SetValue::Points(p) => p.is_empty(),
            SetValue::Cofinite(_) => false,
            SetValue::Intervals(u) => u.is_empty(),
            SetValue::Sequence(s) => s.is_empty(),
            SetValue::Step(s) => SetLike::is_empty(s),
            SetValue::Elementary(e) => e.is_empty(),
        }
    }

    fn union(&self, other: &Self) -> Self {
        use SetValue::*;
        match (self, other) {
            (Points(a), Points(b)) => Points(a.union(b)),
            (Points(p), Cofinite(c)) | (Cofinite(c), Points(p)) => {
                Cofinite(CofiniteSet { missing: c.missing.difference(p) })
            }
            (Cofinite(a), Cofinite(b)) => Cofinite(a.union(b)),
            (Intervals(a), Intervals(b)) => Intervals(a.union(b)),
            (Sequence(a), Sequence(b)) => Sequence(a.union(b)),
            (Step(a), Step(b)) => Step(a.union(b)),
            (Elementary(a), Elementary(b)) => Elementary(a.union(b)),
            _ => mismatch(self, other),
        }
    }

    fn intersection(&self, other: &Self) -> Self {
        use SetValue::*;
        match (self, other) {
            (Points(a), Points(b)) => Points(a.intersection(b)),
            (Points(p), Cofinite(c)) | (Cofinite(c), Points(p)) => Points(p.difference(&c.missing)),
            (Cofinite(a), Cofinite(b)) => Cofinite(a.intersection(b)),
            (Intervals(a), Intervals(b)) => Intervals(a.intersection(b)),
            (Sequence(a), Sequence(b)) => Sequence(a.intersection(b)),
            (Step(a), Step(b)) => Step(a.intersection(b)),
            (Elementary(a), Elementary(b)) => Elementary(a.intersection(b)),
            _ => mismatch(self, other),
        }
    }

    fn difference(&self, other: &Self) -> Self {
        use SetValue::*;
        match (self, other) {
            (Points(a), Points(b)) => Points(a.difference(b)),
            (Points(p), Cofinite(c)) => Points(p.intersection(&c.missing)),
            (Cofinite(c), Points(p)) => Cofinite(CofiniteSet { missing: c.missing.union(p) }),
            (Cofinite(a), Cofinite(b)) => Points(b.missing.difference(&a.missing)),
            (Intervals(a), Intervals(b)) => Intervals(a.difference(b)),
            (Sequence(a), Sequence(b)) => Sequence(a.difference(b)),
            (Step(a), Step(b)) => Step(a.difference(b)),
            (Elementary(a), Elementary(b)) => Elementary(a.difference(b)),
            _ => mismatch(self, other),
        }
    }

    fn sym_diff(&self, other: &Self) -> Self {
        use SetValue::*;
        match (self, other) {
            (Points(a), Points(b)) => Points(a.sym_diff(b)),
            (Points(p), Cofinite(c)) | (Cofinite(c), Points(p)) => {
                Cofinite(CofiniteSet { missing: c.missing.sym_diff(p) })
            }
            (Cofinite(a), Cofinite(b)) => Points(a.missing.sym_diff(&b.missing)),
            (Intervals(a), Intervals(b)) => Intervals(a.sym_diff(b)),
            (Sequence(a), Sequence(b)) => Sequence(a.sym_diff(b)),
            (Step(a), Step(b)) => Step(a.sym_diff(b)),
            (Elementary(a), Elementary(b)) => Elementary(a.sym_diff(b)),
            _ => mismatch(self, other),
        }
    }
}

/// The carrier a catalog measure is defined on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Carrier {
    /// Every carrier with point membership.
    AnyPointCarrier,
    /// Finite subsets of Q.
    FiniteSets,
    /// Sets with finitely many points below every bound; finite ones here.
    InferiorlyFinite,
    SymIntervals,
    /// All eventually constant sequences (every one converges).
    Sequences,
    /// Sequences converging to 0.
    NullSequences,
    /// Left-continuous step functions, all of which have left limits.
    LeftLimitFunctions,
    /// Finitely supported functions R → B₂.
    PointFunctions,
    /// Functions whose support meets the window in finitely many points.
    WindowFunctions(ExtRational, ExtRational),
    ElementaryRing,
    CofiniteSets,
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::AnyPointCarrier => f.write_str("any point carrier"),
            Carrier::FiniteSets => f.write_str("finite subsets of Q"),
            Carrier::InferiorlyFinite => f.write_str("inferiorly finite subsets of Q (finite representatives)"),
            Carrier::SymIntervals => f.write_str("symmetric interval unions"),
            Carrier::Sequences => f.write_str("eventually constant binary sequences"),
            Carrier::NullSequences => f.write_str("binary sequences converging to 0"),
            Carrier::LeftLimitFunctions => f.write_str("left-continuous step functions"),
            Carrier::PointFunctions => f.write_str("finitely supported functions"),
            Carrier::WindowFunctions(a, b) => write!(f, "functions with finite support in [[{a},{b}))"),
            Carrier::ElementaryRing => f.write_str("bounded unions of intervals and points"),
            Carrier::CofiniteSets => f.write_str("cofinite subsets of Q"),
        }
    }
}

/// The catalog constructions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogMeasure {
    Null,
    Restriction(Box<CatalogMeasure>, SetValue),
    Dirac(Rational),
    DiracSum(FiniteSet<Rational>),
    Coord(u64),
    CoordSum(BTreeSet<u64>),
    /// XOR of all terms, on sequences converging to 0.
    SeqXor,
    /// The limit functional.
    Limit,
    FiniteBoolean,
    InferiorlyFinite(Rational),
    LeftLimitEval(Rational),
    SymSup,
    /// π(|supp f|), or π(|supp f ∩ [[a, b))|) with a window.
    IndicatorIntegral(Option<(ExtRational, ExtRational)>),
    StepRingParity,
    CofiniteStar,
}

/// What the construction is claimed to be.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Claim {
    Measure,
    MeasureStar,
    AdditiveOnly,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Claim::Measure => "measure",
            Claim::MeasureStar => "measure*",
            Claim::AdditiveOnly => "additive, not countably additive",
        })
    }
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub params: &'static str,
    pub carrier: &'static str,
    pub claim: &'static str,
}

pub fn catalog_entries() -> Vec<CatalogEntry> {
    let e = |name, params, carrier, claim| CatalogEntry { name, params, carrier, claim };
    vec![
        e("null", "", "any point carrier", "measure"),
        e("restriction", "<measure>, <set>", "carrier of <measure>", "measure when <measure> is"),
        e("dirac", "<x>", "any point carrier", "measure"),
        e("dirac_sum", "<x>,...", "any point carrier", "measure"),
        e("coord", "<k>", "binary sequences", "measure"),
        e("coord_sum", "<k>,...", "binary sequences", "measure"),
        e("seq_xor", "", "sequences converging to 0", "measure"),
        e("limit", "", "convergent binary sequences", "additive, not countably additive"),
        e("finite_boolean", "", "finite subsets of Q", "measure"),
        e("inferiorly_finite", "<alpha>", "inferiorly finite sets", "measure"),
        e("left_limit_eval", "<t>", "left-continuous step functions", "measure on this class"),
        e("sym_sup", "", "symmetric interval unions", "additive; fails on unbounded chains"),
        e("indicator_integral", "[<[a,b)>]", "finitely supported functions", "measure"),
        e("step_ring_parity", "", "bounded unions of intervals and points", "additive, not countably additive"),
        e("cofinite_star", "", "cofinite subsets of Q", "measure*"),
    ]
}

fn bad(name: &str, message: impl Into<String>) -> CatalogError {
    CatalogError::BadParameters { name: name.to_string(), message: message.into() }
}

/// Splits on top-level commas, ignoring commas nested in brackets.
fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    out
}

/// Splits at the first top-level comma only, leaving the set literal whole.
fn split_first(s: &str) -> Vec<&str> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => return vec![s[..i].trim(), s[i + 1..].trim()],
            _ => {}
        }
    }
    if s.trim().is_empty() { Vec::new() } else { vec![s.trim()] }
}

impl CatalogMeasure {
    /// Strips restrictions off to the underlying construction.
    pub fn base(&self) -> &CatalogMeasure {
        match self {
            CatalogMeasure::Restriction(inner, _) => inner.base(),
            m => m,
        }
    }

    /// Parses `name(args)`; a bare name stands for `name()`.
    pub fn parse(text: &str) -> Result<CatalogMeasure, CatalogError> {
        let text = text.trim();
        let (name, args) = match text.find('(') {
            Some(i) => {
                if !text.ends_with(')') {
                    return Err(CatalogError::Malformed(text.to_string()));
                }
                (text[..i].trim(), &text[i + 1..text.len() - 1])
            }
            None => (text, ""),
        };
        let name_norm = name.replace('-', "_");
        let args = if name_norm == "restriction" { split_first(args) } else { split_args(args) };
        let no_args = |m: CatalogMeasure| {
            if args.is_empty() { Ok(m) } else { Err(bad(name, "takes no parameters")) }
        };
        let rational = |s: &str| literal::parse_rational(s).map_err(|e| bad(name, e.to_string()));
        let index = |s: &str| s.parse::<u64>().map_err(|_| bad(name, format!("`{s}` is not a natural index")));
        match name_norm.as_str() {
            "null" => no_args(CatalogMeasure::Null),
            "restriction" => {
                if args.len() != 2 {
                    return Err(bad(name, "expects <measure>, <set>"));
                }
                let inner = CatalogMeasure::parse(args[0])?;
                let set = parse_set_value(&inner.carrier(), args[1])?;
                Ok(CatalogMeasure::Restriction(Box::new(inner), set))
            }
            "dirac" => match args.as_slice() {
                [x] => Ok(CatalogMeasure::Dirac(rational(x)?)),
                _ => Err(bad(name, "expects one point")),
            },
            "dirac_sum" => {
                let mut h = BTreeSet::new();
                for a in &args {
                    if !h.insert(rational(a)?) {
                        return Err(bad(name, format!("duplicate point {a}")));
                    }
                }
                Ok(CatalogMeasure::DiracSum(FiniteSet(h)))
            }
            "coord" => match args.as_slice() {
                [k] => Ok(CatalogMeasure::Coord(index(k)?)),
                _ => Err(bad(name, "expects one index")),
            },
            "coord_sum" => {
                let mut h = BTreeSet::new();
                for a in &args {
                    if !h.insert(index(a)?) {
                        return Err(bad(name, format!("duplicate index {a}")));
                    }
                }
                Ok(CatalogMeasure::CoordSum(h))
            }
            "seq_xor" => no_args(CatalogMeasure::SeqXor),
            "limit" => no_args(CatalogMeasure::Limit),
            "finite_boolean" => no_args(CatalogMeasure::FiniteBoolean),
            "inferiorly_finite" => match args.as_slice() {
                [a] => Ok(CatalogMeasure::InferiorlyFinite(rational(a)?)),
                _ => Err(bad(name, "expects alpha")),
            },
            "left_limit_eval" => match args.as_slice() {
                [t] => Ok(CatalogMeasure::LeftLimitEval(rational(t)?)),
                _ => Err(bad(name, "expects a point t")),
            },
            "sym_sup" => no_args(CatalogMeasure::SymSup),
            "indicator_integral" => match args.as_slice() {
                [] => Ok(CatalogMeasure::IndicatorIntegral(None)),
                [w] if w == &"inf" || w == &"all" => Ok(CatalogMeasure::IndicatorIntegral(None)),
                [w] => {
                    let (a, b) = literal::parse_single_interval(w).map_err(|e| bad(name, e.to_string()))?;
                    Ok(CatalogMeasure::IndicatorIntegral(Some((a, b))))
                }
                [a, b] => {
                    let a = literal::parse_ext(a).map_err(|e| bad(name, e.to_string()))?;
                    let b = literal::parse_ext(b).map_err(|e| bad(name, e.to_string()))?;
                    Ok(CatalogMeasure::IndicatorIntegral(Some((a, b))))
                }
                _ => Err(bad(name, "expects an optional window [a,b)")),
            },
            "step_ring_parity" => no_args(CatalogMeasure::StepRingParity),
            "cofinite_star" => no_args(CatalogMeasure::CofiniteStar),
            _ => Err(CatalogError::UnknownConstruction(name.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CatalogMeasure::Null => "null",
            CatalogMeasure::Restriction(..) => "restriction",
            CatalogMeasure::Dirac(_) => "dirac",
            CatalogMeasure::DiracSum(_) => "dirac_sum",
            CatalogMeasure::Coord(_) => "coord",
            CatalogMeasure::CoordSum(_) => "coord_sum",
            CatalogMeasure::SeqXor => "seq_xor",
            CatalogMeasure::Limit => "limit",
            CatalogMeasure::FiniteBoolean => "finite_boolean",
            CatalogMeasure::InferiorlyFinite(_) => "inferiorly_finite",
            CatalogMeasure::LeftLimitEval(_) => "left_limit_eval",
            CatalogMeasure::SymSup => "sym_sup",
            CatalogMeasure::IndicatorIntegral(_) => "indicator_integral",
            CatalogMeasure::StepRingParity => "step_ring_parity",
            CatalogMeasure::CofiniteStar => "cofinite_star",
        }
    }

    pub fn carrier(&self) -> Carrier {
        match self {
            CatalogMeasure::Null | CatalogMeasure::Dirac(_) | CatalogMeasure::DiracSum(_) => {
                Carrier::AnyPointCarrier
            }
            CatalogMeasure::Restriction(inner, _) => inner.carrier(),
            CatalogMeasure::Coord(_) | CatalogMeasure::CoordSum(_) | CatalogMeasure::Limit => Carrier::Sequences,
            CatalogMeasure::SeqXor => Carrier::NullSequences,
            CatalogMeasure::FiniteBoolean => Carrier::FiniteSets,
            CatalogMeasure::InferiorlyFinite(_) => Carrier::InferiorlyFinite,
            CatalogMeasure::LeftLimitEval(_) => Carrier::LeftLimitFunctions,
            CatalogMeasure::SymSup => Carrier::SymIntervals,
            CatalogMeasure::IndicatorIntegral(None) => Carrier::PointFunctions,
            CatalogMeasure::IndicatorIntegral(Some((a, b))) => Carrier::WindowFunctions(*a, *b),
            CatalogMeasure::StepRingParity => Carrier::ElementaryRing,
            CatalogMeasure::CofiniteStar => Carrier::CofiniteSets,
        }
    }

    pub fn claim(&self) -> Claim {
        match self {
            CatalogMeasure::Limit | CatalogMeasure::StepRingParity => Claim::AdditiveOnly,
            CatalogMeasure::CofiniteStar => Claim::MeasureStar,
            CatalogMeasure::Restriction(inner, _) => inner.claim(),
            _ => Claim::Measure,
        }
    }

    fn domain_error(&self, set: &SetValue) -> DomainError {
        DomainError { measure: self.to_string(), set: format!("{} ({})", set, set.kind()) }
    }

    pub fn eval(&self, set: &SetValue) -> Result<Bit, DomainError> {
        let wrong = || Err(self.domain_error(set));
        match (self, set) {
            (CatalogMeasure::Null, _) => Ok(Bit::ZERO),
            (CatalogMeasure::Restriction(inner, a), b) => {
                if std::mem::discriminant(a) != std::mem::discriminant(b)
                    && !matches!((a, b), (SetValue::Points(_), SetValue::Cofinite(_)) | (SetValue::Cofinite(_), SetValue::Points(_)))
                {
                    return wrong();
                }
                inner.eval(&a.intersection(b))
            }
            (CatalogMeasure::Dirac(x), s) => match s.contains_point(*x) {
                Some(v) => Ok(Bit::from_bool(v)),
                None => wrong(),
            },
            (CatalogMeasure::DiracSum(h), s) => {
                let mut acc = Bit::ZERO;
                for x in h.iter() {
                    match s.contains_point(*x) {
                        Some(v) => acc ^= Bit::from_bool(v),
                        None => return wrong(),
                    }
                }
                Ok(acc)
            }
            (CatalogMeasure::Coord(k), SetValue::Sequence(s)) => Ok(s.get(*k)),
            (CatalogMeasure::CoordSum(h), SetValue::Sequence(s)) => Ok(h.iter().map(|&k| s.get(k)).collect()),
            (CatalogMeasure::SeqXor, SetValue::Sequence(s)) if !s.tail().is_one() => Ok(parity(s.flips().len())),
            (CatalogMeasure::Limit, SetValue::Sequence(s)) => Ok(limit_measure_eval(s)),
            (CatalogMeasure::FiniteBoolean, SetValue::Points(p)) => Ok(parity(p.len())),
            (CatalogMeasure::InferiorlyFinite(alpha), SetValue::Points(p)) => {
                Ok(parity(p.iter().filter(|x| *x < alpha).count()))
            }
            (CatalogMeasure::LeftLimitEval(t), SetValue::Step(f)) => Ok(f.left_limit(ExtRational::Finite(*t))),
            (CatalogMeasure::SymSup, SetValue::Intervals(u)) => Ok(u.sup_is_infinite()),
            (CatalogMeasure::IndicatorIntegral(None), SetValue::Points(p)) => Ok(parity(p.len())),
            (CatalogMeasure::IndicatorIntegral(None), SetValue::Step(f)) if SetLike::is_empty(f) => Ok(Bit::ZERO),
            (CatalogMeasure::IndicatorIntegral(Some((a, b))), SetValue::Points(p)) => {
                let w = IntervalUnion::interval(*a, *b);
                Ok(parity(p.iter().filter(|x| w.member(**x).is_one()).count()))
            }
            (CatalogMeasure::IndicatorIntegral(Some((a, b))), SetValue::Step(f)) => {
                match step_window_points(f, &IntervalUnion::interval(*a, *b)) {
                    Some(n) => Ok(parity(n)),
                    None => wrong(),
                }
            }
            (CatalogMeasure::StepRingParity, SetValue::Elementary(e)) => Ok(e.parity_measure()),
            (CatalogMeasure::CofiniteStar, SetValue::Cofinite(c)) => Ok(!parity(c.missing().len())),
            _ => wrong(),
        }
    }
}

/// |supp f ∩ W| when finite. Support pieces are (lo, hi], so a piece can
/// touch a window [a, b) in the single point hi.
pub(crate) fn step_window_points(f: &BinaryStepFunction, w: &IntervalUnion) -> Option<usize> {
    let mut touched = BTreeSet::new();
    for (lo, hi) in f.support_pieces() {
        for &(a, b) in w.components() {
            if lo.max(a) < hi.min(b) {
                return None;
            }
            if let ExtRational::Finite(h) = hi {
                if a <= hi && hi < b {
                    touched.insert(h);
                }
            }
        }
    }
    Some(touched.len())
}

impl fmt::Display for CatalogMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.name();
        match self {
            CatalogMeasure::Restriction(inner, a) => write!(f, "{name}({inner}, {a})"),
            CatalogMeasure::Dirac(x) | CatalogMeasure::InferiorlyFinite(x) | CatalogMeasure::LeftLimitEval(x) => {
                write!(f, "{name}({})", ExtRational::Finite(*x))
            }
            CatalogMeasure::DiracSum(h) => {
                write!(f, "{name}(")?;
                write_list(f, h.iter().map(|x| ExtRational::Finite(*x)))?;
                f.write_str(")")
            }
            CatalogMeasure::Coord(k) => write!(f, "{name}({k})"),
            CatalogMeasure::CoordSum(h) => {
                write!(f, "{name}(")?;
                write_list(f, h.iter())?;
                f.write_str(")")
            }
            CatalogMeasure::IndicatorIntegral(Some((a, b))) => write!(f, "{name}([{a},{b}))"),
            _ => write!(f, "{name}()"),
        }
    }
}

impl Measure<SetValue> for CatalogMeasure {
    fn eval(&self, set: &SetValue) -> Result<Bit, DomainError> {
        CatalogMeasure::eval(self, set)
    }
    fn describe(&self) -> String {
        self.to_string()
    }
}

/// Parses a set literal for the given carrier. Point carriers accept any
/// literal with point membership, chosen by its leading keyword.
pub fn parse_set_value(carrier: &Carrier, text: &str) -> Result<SetValue, CatalogError> {
    let t = text.trim();
    let value = match carrier {
        Carrier::FiniteSets | Carrier::InferiorlyFinite | Carrier::PointFunctions | Carrier::WindowFunctions(..) => {
            if t.starts_with("init=") {
                SetValue::Step(literal::parse_stepfn(t)?)
            } else {
                SetValue::Points(literal::parse_points(t)?)
            }
        }
        Carrier::SymIntervals => SetValue::Intervals(literal::parse_interval_union(t)?),
        Carrier::Sequences | Carrier::NullSequences => SetValue::Sequence(literal::parse_sequence(t)?),
        Carrier::LeftLimitFunctions => SetValue::Step(literal::parse_stepfn(t)?),
        Carrier::ElementaryRing => SetValue::Elementary(literal::parse_sring(t)?),
        Carrier::CofiniteSets => {
            if t.starts_with("cofinite") {
                SetValue::Cofinite(literal::parse_cofinite(t)?)
            } else {
                SetValue::Points(literal::parse_points(t)?)
            }
        }
        Carrier::AnyPointCarrier => sniff_set_value(t)?,
    };
    Ok(value)
}

fn sniff_set_value(t: &str) -> Result<SetValue, CatalogError> {
    Ok(if t.starts_with("seq") {
        SetValue::Sequence(literal::parse_sequence(t)?)
    } else if t.starts_with("cofinite") {
        SetValue::Cofinite(literal::parse_cofinite(t)?)
    } else if t.starts_with("sring") {
        SetValue::Elementary(literal::parse_sring(t)?)
    } else if t.starts_with("init=") {
        SetValue::Step(literal::parse_stepfn(t)?)
    } else if t.starts_with('[') {
        SetValue::Intervals(literal::parse_interval_union(t)?)
    } else {
        SetValue::Points(literal::parse_points(t)?)
    })
}

/// The limit of an eventually constant sequence: its tail value.
pub fn limit_measure_eval(x: &BinarySequence) -> Bit {
    x.tail()
}

/// The two additive, non-countably-additive constructions, plus the
/// unbounded chain on which the sup-at-infinity function diverges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CounterexampleCase {
    /// Limit functional on the canonical basis e⁽ⁿ⁾.
    Seq36,
    /// Parity on the interval-and-point ring, on [1/(n+2), 1/(n+1)).
    Interval313,
    /// sup-at-infinity on [[n, n+1)).
    SymSupTail,
}

impl CounterexampleCase {
    pub const ALL: [CounterexampleCase; 3] =
        [CounterexampleCase::Seq36, CounterexampleCase::Interval313, CounterexampleCase::SymSupTail];

    pub fn id(self) -> &'static str {
        match self {
            CounterexampleCase::Seq36 => "seq-3-6",
            CounterexampleCase::Interval313 => "interval-3-13",
            CounterexampleCase::SymSupTail => "sym-sup-tail",
        }
    }
}

impl std::str::FromStr for CounterexampleCase {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.replace('_', "-");
        CounterexampleCase::ALL
            .into_iter()
            .find(|c| c.id() == norm)
            .ok_or_else(|| format!("unknown case `{s}` (expected seq-3-6, interval-3-13, sym-sup-tail)"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivergenceReport {
    pub case: CounterexampleCase,
    pub union_value: Bit,
    pub xor_sum: Bit,
    pub countably_additive: Bit,
    /// Pairwise disjointness and containment were verified to this depth.
    pub disjoint_to_depth: usize,
    pub detail: CountableReport,
}

impl fmt::Display for DivergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "case={} union_value={} xor_sum={} countably_additive={} disjoint_to_depth={}",
            self.case.id(),
            self.union_value,
            self.xor_sum,
            self.countably_additive,
            self.disjoint_to_depth
        )
    }
}

/// The divergent family of each case with its measure.
pub fn counterexample_family(case: CounterexampleCase) -> (CatalogMeasure, DisjointFamily<SetValue>) {
    let zero_after_start = TailCertificate { index: 0, reason: TailReason::MeasureZeroAfter };
    match case {
        CounterexampleCase::Seq36 => (
            CatalogMeasure::Limit,
            DisjointFamily::new(
                "canonical basis e(n)",
                |n| SetValue::Sequence(BinarySequence::basis(n as u64)),
                SetValue::Sequence(BinarySequence::constant(Bit::ONE)),
                zero_after_start,
            ),
        ),
        CounterexampleCase::Interval313 => (
            CatalogMeasure::StepRingParity,
            DisjointFamily::new(
                "[1/(n+2), 1/(n+1))",
                |n| {
                    let k = n as i128;
                    SetValue::Elementary(ElementarySet::left_closed(q(1, k + 2), q(1, k + 1)))
                },
                SetValue::Elementary(ElementarySet::open(qi(0), qi(1))),
                zero_after_start,
            ),
        ),
        CounterexampleCase::SymSupTail => (
            CatalogMeasure::SymSup,
            DisjointFamily::new(
                "[[n, n+1))",
                |n| SetValue::Intervals(IntervalUnion::interval(n as i128, n as i128 + 1)),
                SetValue::Intervals(IntervalUnion::interval(0, ExtRational::PosInf)),
                zero_after_start,
            ),
        ),
    }
}

pub fn counterexample_divergence(case: CounterexampleCase, depth: usize) -> Result<DivergenceReport, CatalogError> {
    let (mu, fam) = counterexample_family(case);
    let depth = depth.max(1);
    let detail = check_countable_family(&mu, &fam, depth)?;
    Ok(DivergenceReport {
        case,
        union_value: detail.union_value,
        xor_sum: detail.xor_sum,
        countably_additive: detail.finitely_many_ones & detail.xor_equality,
        disjoint_to_depth: depth,
        detail,
    })
}

/// A random element of the carrier the measure lives on.
pub fn sample_set<R: Rng + ?Sized>(carrier: &Carrier, rng: &mut R) -> SetValue {
    match carrier {
        Carrier::FiniteSets | Carrier::PointFunctions | Carrier::WindowFunctions(..) => {
            SetValue::Points(sample::finite_points(rng, 8, 6, 3))
        }
        Carrier::InferiorlyFinite => SetValue::Points(sample::finite_points(rng, 8, 6, 2)),
        Carrier::SymIntervals | Carrier::AnyPointCarrier => SetValue::Intervals(sample::interval_union(rng, 6)),
        Carrier::Sequences | Carrier::NullSequences => {
            let (o, t) = sample::sequence_parts(rng, 12, *carrier == Carrier::Sequences);
            SetValue::Sequence(BinarySequence::new(o, t))
        }
        Carrier::LeftLimitFunctions => SetValue::Step(sample::step_function(rng, 6, 4)),
        Carrier::ElementaryRing => SetValue::Elementary(sample_elementary(rng)),
        Carrier::CofiniteSets => SetValue::Cofinite(CofiniteSet { missing: sample::finite_points(rng, 6, 6, 2) }),
    }
}

pub fn sample_elementary<R: Rng + ?Sized>(rng: &mut R) -> ElementarySet {
    let opens: Vec<(Rational, Rational)> =
        (0..rng.gen_range(0..=3)).map(|_| (sample::rational(rng, 4, 4), sample::rational(rng, 4, 4))).collect();
    let points: Vec<Rational> = (0..rng.gen_range(0..=3)).map(|_| sample::rational(rng, 4, 4)).collect();
    ElementarySet::from_parts(&opens, &points)
}

/// Carriers a measure is exercised on: point-carrier measures run on
/// finite sets and on interval unions.
pub fn test_carriers(m: &CatalogMeasure) -> Vec<Carrier> {
    match m.carrier() {
        Carrier::AnyPointCarrier => match m {
            CatalogMeasure::Restriction(_, a) => vec![carrier_of_value(a)],
            _ => vec![Carrier::FiniteSets, Carrier::SymIntervals],
        },
        c => vec![c],
    }
}

fn carrier_of_value(v: &SetValue) -> Carrier {
    match v {
        SetValue::Points(_) => Carrier::FiniteSets,
        SetValue::Cofinite(_) => Carrier::CofiniteSets,
        SetValue::Intervals(_) => Carrier::SymIntervals,
        SetValue::Sequence(_) => Carrier::Sequences,
        SetValue::Step(_) => Carrier::LeftLimitFunctions,
        SetValue::Elementary(_) => Carrier::ElementaryRing,
    }
}

/// Makes a list of sets pairwise disjoint: A_i ∖ (A_0 ∪ … ∪ A_{i−1}).
pub fn disjointify<S: SetLike>(sets: Vec<S>) -> Vec<S> {
    let mut seen: Option<S> = None;
    let mut out = Vec::with_capacity(sets.len());
    for s in sets {
        let piece = match &seen {
            Some(u) => s.difference(u),
            None => s.clone(),
        };
        seen = Some(match seen {
            Some(u) => u.union(&s),
            None => s,
        });
        out.push(piece);
    }
    out
}

fn union_all<S: SetLike>(sets: &[S], empty: S) -> S {
    sets.iter().fold(empty, |u, s| u.union(s))
}

/// Points whose membership decides the measure on interval sets.
fn decisive_points(m: &CatalogMeasure) -> Option<Vec<Rational>> {
    match m {
        CatalogMeasure::Null => Some(Vec::new()),
        CatalogMeasure::Dirac(x) => Some(vec![*x]),
        CatalogMeasure::DiracSum(h) => Some(h.iter().copied().collect()),
        CatalogMeasure::Restriction(inner, _) => decisive_points(inner),
        _ => None,
    }
}

/// The structured countable families for `m` on `carrier`: random finite
/// partitions plus the infinite chains native to the carrier.
pub fn structured_families<R: Rng + ?Sized>(
    m: &CatalogMeasure,
    carrier: &Carrier,
    rng: &mut R,
    count: usize,
) -> Vec<DisjointFamily<SetValue>> {
    let mut out = Vec::new();
    for _ in 0..count {
        let k = rng.gen_range(1..=5);
        let sets: Vec<SetValue> = (0..k).map(|_| sample_set(carrier, rng)).collect();
        let sets = match carrier {
            Carrier::CofiniteSets => continue,
            _ => disjointify(sets),
        };
        let union = union_all(&sets, sets[0].empty_like());
        out.push(DisjointFamily::finite("finite partition", sets, union));
    }
    match carrier {
        Carrier::SymIntervals | Carrier::AnyPointCarrier => {
            let Some(points) = decisive_points(m) else {
                if *m.base() == CatalogMeasure::SymSup {
                    // bounded-above chains: every member and the union have finite sup
                    for _ in 0..count {
                        let t0 = sample::rational(rng, 5, 3);
                        let b = t0 + abs(sample::rational(rng, 5, 3)) + qi(1);
                        for chain in [Chain::ToFinite { t0, b }, Chain::FromNegInfinity { b, step: q(1, 2) }] {
                            out.push(interval_chain_family(vec![chain], 0));
                        }
                    }
                }
                return out;
            };
            let f = BinaryStepFunction::normalize(Bit::ZERO, points);
            for _ in 0..count {
                let t0 = sample::rational(rng, 5, 3);
                let b = t0 + abs(sample::rational(rng, 5, 3)) + qi(1);
                let step = q(rng.gen_range(1..=4), rng.gen_range(1..=3));
                let chains = vec![
                    Chain::FromNegInfinity { b: t0 - qi(1), step },
                    Chain::ToFinite { t0, b },
                    Chain::ToInfinity { t0: b, step },
                ];
                let index = chains.iter().map(|c| c.certificate(&f)).max().unwrap_or(0);
                out.push(interval_chain_family(chains, index));
            }
        }
        Carrier::Sequences | Carrier::NullSequences => {
            let index = match m.base() {
                CatalogMeasure::Coord(k) => *k as usize + 1,
                CatalogMeasure::CoordSum(h) => h.iter().max().map(|k| *k as usize + 1).unwrap_or(0),
                _ => 0,
            };
            if *carrier == Carrier::Sequences {
                out.push(DisjointFamily::new(
                    "canonical basis e(n)",
                    |n| SetValue::Sequence(BinarySequence::basis(n as u64)),
                    SetValue::Sequence(BinarySequence::constant(Bit::ONE)),
                    TailCertificate { index, reason: TailReason::MeasureZeroAfter },
                ));
            }
            for _ in 0..count {
                let stop = rng.gen_range(0..12u64);
                out.push(DisjointFamily::new(
                    "truncated basis",
                    move |n| {
                        let n = n as u64;
                        SetValue::Sequence(if n < stop { BinarySequence::basis(n) } else { BinarySequence::default() })
                    },
                    SetValue::Sequence(BinarySequence::from_flips(Bit::ZERO, 0..stop)),
                    TailCertificate { index: stop as usize, reason: TailReason::AllEmptyAfter },
                ));
            }
        }
        Carrier::LeftLimitFunctions => {
            let t = match m.base() {
                CatalogMeasure::LeftLimitEval(t) => Some(*t),
                _ => None,
            };
            for _ in 0..count {
                let a = sample::rational(rng, 5, 3);
                let t0 = a + abs(sample::rational(rng, 5, 3)) + qi(1);
                out.push(step_descending_family(a, t0, t));
                let h = q(rng.gen_range(1..=4), rng.gen_range(1..=3));
                out.push(step_rising_family(t0, h, t));
            }
        }
        Carrier::CofiniteSets => {}
        _ => {}
    }
    out
}

fn interval_chain_family(chains: Vec<Chain>, index: usize) -> DisjointFamily<SetValue> {
    let union = chains.iter().fold(IntervalUnion::empty(), |u, c| u.union(&c.union()));
    DisjointFamily::new(
        format!("{} interval chain(s)", chains.len()),
        move |n| SetValue::Intervals(chains.iter().fold(IntervalUnion::empty(), |u, c| u.union(&c.member(n)))),
        SetValue::Intervals(union),
        TailCertificate { index, reason: TailReason::MeasureZeroAfter },
    )
}

/// Pieces (t_{n+1}, t_n] with t_n = a + (t0 − a)/(n + 1) ↓ a; union (a, t0].
fn step_descending_family(a: Rational, t0: Rational, t: Option<Rational>) -> DisjointFamily<SetValue> {
    let index = match t {
        Some(t) if t > a => (floor_int((t0 - a) / (t - a)) + 1).max(0) as usize,
        _ => 0,
    };
    let tn = move |n: i128| a + (t0 - a) / qi(n + 1);
    DisjointFamily::new(
        "left-open pieces shrinking to a point",
        move |n| SetValue::Step(BinaryStepFunction::indicator(tn(n as i128 + 1), tn(n as i128))),
        SetValue::Step(BinaryStepFunction::indicator(a, t0)),
        TailCertificate { index, reason: TailReason::MeasureZeroAfter },
    )
}

/// Pieces (t0 + n h, t0 + (n+1) h]; union (t0, ∞).
fn step_rising_family(t0: Rational, h: Rational, t: Option<Rational>) -> DisjointFamily<SetValue> {
    let index = match t {
        Some(t) if t > t0 => ceil_int((t - t0) / h).max(0) as usize,
        _ => 0,
    };
    DisjointFamily::new(
        "left-open pieces rising to infinity",
        move |n| {
            let k = n as i128;
            SetValue::Step(BinaryStepFunction::indicator(t0 + h * qi(k), t0 + h * qi(k + 1)))
        },
        SetValue::Step(BinaryStepFunction::normalize(Bit::ZERO, [t0])),
        TailCertificate { index, reason: TailReason::MeasureZeroAfter },
    )
}

/// Additivity on sampled pairs, or additivity* for the cofinite dual.
pub fn sampled_additivity_witness<R: Rng + ?Sized>(
    m: &CatalogMeasure,
    carrier: &Carrier,
    rng: &mut R,
    samples: usize,
) -> Result<Option<String>, CatalogError> {
    for _ in 0..samples {
        let a = sample_set(carrier, rng);
        let b = sample_set(carrier, rng);
        if *carrier == Carrier::CofiniteSets {
            let (SetValue::Cofinite(x), SetValue::Cofinite(y)) = (&a, &b) else { unreachable!() };
            let (mx, my) = (m.eval(&a)?, m.eval(&b)?);
            let theta = m.eval(&SetValue::Cofinite(x.theta(y)))?;
            if theta != mx.xnor(my) {
                return Ok(Some(format!("A={a} B={b}: mu(A theta B) != mu(A) xnor mu(B)")));
            }
            // a covering pair: give y the points x misses
            let covering = CofiniteSet { missing: y.missing().difference(x.missing()) };
            let mc = m.eval(&SetValue::Cofinite(covering.clone()))?;
            if m.eval(&SetValue::Cofinite(x.intersection(&covering)))? != mx.xnor(mc) {
                return Ok(Some(format!("A={a} B={covering}: mu(A cap B) != mu(A) xnor mu(B)")));
            }
            continue;
        }
        let (ma, mb) = (m.eval(&a)?, m.eval(&b)?);
        let d = a.sym_diff(&b);
        let domain_ok = |s: &SetValue| m.eval(s).is_ok();
        if domain_ok(&d) && m.eval(&d)? != ma ^ mb {
            return Ok(Some(format!("A={a} B={b}: mu(A delta B) != mu(A) xor mu(B)")));
        }
        let b2 = b.difference(&a);
        if domain_ok(&b2) {
            let u = a.union(&b2);
            if m.eval(&u)? != ma ^ m.eval(&b2)? {
                return Ok(Some(format!("A={a} B={b2}: disjoint union breaks additivity")));
            }
        }
    }
    Ok(None)
}

/// Countable additivity* for the cofinite dual, through complement
/// transport onto finite sets, together with a direct ⊗-fold.
pub fn cofinite_star_family_check<R: Rng + ?Sized>(rng: &mut R, depth: usize) -> Result<bool, CatalogError> {
    let star = CatalogMeasure::CofiniteStar;
    let base = sample::finite_points(rng, 10, 6, 2);
    let parts = rng.gen_range(1..=6);
    let blocks = sample::partition(rng, &base, parts);
    // disjoint*: pairwise unions are X because the complements are disjoint
    let members: Vec<CofiniteSet> = blocks.iter().map(|b| CofiniteSet { missing: b.clone() }).collect();
    let meet = CofiniteSet { missing: base.clone() };
    let direct = members
        .iter()
        .map(|c| star.eval(&SetValue::Cofinite(c.clone())))
        .try_fold(Bit::ONE, |acc, v| v.map(|v| acc.xnor(v)))?;
    // padded members are X itself, whose value 1 is neutral for ⊗
    let folded_ok = direct == star.eval(&SetValue::Cofinite(meet))?;
    let transported = crate::set_function::FnMeasure::new("transport", move |s: &SetValue| match s {
        SetValue::Points(p) => !star.eval(&SetValue::Cofinite(CofiniteSet { missing: p.clone() })).expect("cofinite"),
        _ => Bit::ZERO,
    });
    let fam = DisjointFamily::finite(
        "complements",
        blocks.into_iter().map(SetValue::Points).collect(),
        SetValue::Points(base),
    );
    let report = check_countable_family(&transported, &fam, depth.max(fam.tail.index))?;
    Ok(folded_ok && report.passes())
}

/// Outcome of the structured suite for one measure on one carrier.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub measure: String,
    pub carrier: Carrier,
    pub additivity_witness: Option<String>,
    pub families: usize,
    pub countable_failures: Vec<String>,
}

impl SuiteReport {
    pub fn passes(&self) -> bool {
        self.additivity_witness.is_none() && self.countable_failures.is_empty()
    }
}

pub fn measure_suite<R: Rng + ?Sized>(
    m: &CatalogMeasure,
    rng: &mut R,
    depth: usize,
    samples: usize,
    families: usize,
) -> Result<Vec<SuiteReport>, CatalogError> {
    let mut out = Vec::new();
    for carrier in test_carriers(m) {
        let additivity_witness = sampled_additivity_witness(m, &carrier, rng, samples)?;
        let mut countable_failures = Vec::new();
        let fams = structured_families(m, &carrier, rng, families);
        let n = fams.len();
        for fam in fams {
            let report = check_countable_family(m, &fam, depth.max(fam.tail.index + 1))?;
            if !report.passes() {
                countable_failures.push(format!("{}: {}", fam.label, report.witness.unwrap_or_default()));
            }
        }
        let mut total = n;
        if carrier == Carrier::CofiniteSets {
            for _ in 0..families {
                total += 1;
                if !cofinite_star_family_check(rng, depth)? {
                    countable_failures.push("cofinite partition failed the xnor fold".into());
                }
            }
        }
        out.push(SuiteReport {
            measure: m.to_string(),
            carrier,
            additivity_witness,
            families: total,
            countable_failures,
        });
    }
    Ok(out)
}

/// One representative of every catalog construction.
pub fn representatives() -> Vec<CatalogMeasure> {
    vec![
        CatalogMeasure::Null,
        CatalogMeasure::Restriction(
            Box::new(CatalogMeasure::DiracSum(FiniteSet::new([qi(0), q(1, 2), qi(3)]))),
            SetValue::Intervals(IntervalUnion::interval(-1, 2)),
        ),
        CatalogMeasure::Restriction(
            Box::new(CatalogMeasure::FiniteBoolean),
            SetValue::Points(FiniteSet::new([qi(0), qi(1), qi(2), q(1, 2)])),
        ),
        CatalogMeasure::Dirac(q(1, 2)),
        CatalogMeasure::DiracSum(FiniteSet::new([qi(-1), qi(0), q(5, 2)])),
        CatalogMeasure::Coord(3),
        CatalogMeasure::CoordSum([0, 2, 5].into_iter().collect()),
        CatalogMeasure::SeqXor,
        CatalogMeasure::Limit,
        CatalogMeasure::FiniteBoolean,
        CatalogMeasure::InferiorlyFinite(qi(0)),
        CatalogMeasure::LeftLimitEval(q(1, 3)),
        CatalogMeasure::SymSup,
        CatalogMeasure::IndicatorIntegral(None),
        CatalogMeasure::IndicatorIntegral(Some((ExtRational::from(0), ExtRational::from(2)))),
        CatalogMeasure::StepRingParity,
        CatalogMeasure::CofiniteStar,
    ]
}

/// Midpoints of consecutive breakpoints, handy as membership probes.
pub fn elementary_probes(sets: &[&ElementarySet]) -> Vec<Rational> {
    let mut ats: Vec<Rational> = sets.iter().flat_map(|s| s.breaks().iter().map(|b| b.at)).collect();
    ats.sort();
    ats.dedup();
    let mut probes = ats.clone();
    probes.extend(ats.windows(2).map(|w| midpoint(w[0], w[1])));
    if let (Some(first), Some(last)) = (ats.first(), ats.last()) {
        probes.push(*first - qi(1));
        probes.push(*last + qi(1));
    }
    probes
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pts(xs: &[i128]) -> SetValue {
        SetValue::Points(FiniteSet::new(xs.iter().map(|&x| qi(x))))
    }

    #[test]
    fn catalog_examples() {
        assert_eq!(CatalogMeasure::FiniteBoolean.eval(&pts(&[1, 2, 3])).unwrap(), Bit::ONE);
        let sup = CatalogMeasure::SymSup;
        let i = |a: i128, b: ExtRational| SetValue::Intervals(IntervalUnion::interval(a, b));
        assert_eq!(sup.eval(&i(0, ExtRational::PosInf)).unwrap(), Bit::ONE);
        assert_eq!(sup.eval(&i(0, ExtRational::from(5))).unwrap(), Bit::ZERO);
        let inf = CatalogMeasure::InferiorlyFinite(qi(0));
        assert_eq!(inf.eval(&pts(&[-3, -1, 7])).unwrap(), Bit::ZERO);
        // count oracle
        let below = [-3i128, -1, 7].iter().filter(|x| **x < 0).count();
        assert_eq!(below % 2, 0);
    }

    #[test]
    fn limit_examples() {
        assert_eq!(limit_measure_eval(&BinarySequence::constant(Bit::ONE)), Bit::ONE);
        assert_eq!(limit_measure_eval(&BinarySequence::basis(4)), Bit::ZERO);
        let x = BinarySequence::new([(0, Bit::ONE), (5, Bit::ONE)], Bit::ZERO);
        assert_eq!(limit_measure_eval(&x), Bit::ZERO);
        assert_eq!(x.get(5), Bit::ONE);
        assert_eq!(x.get(6), Bit::ZERO);
    }

    #[test]
    fn sequence_representation_is_minimal() {
        let x = BinarySequence::new([(0, Bit::ONE), (1, Bit::ONE), (2, Bit::ZERO)], Bit::ONE);
        assert_eq!(x.flips().iter().copied().collect::<Vec<_>>(), vec![2]);
        let y = BinarySequence::basis(2);
        assert_eq!(x.union(&y), BinarySequence::constant(Bit::ONE));
        assert!(x.is_disjoint(&y));
    }

    #[test]
    fn divergence_examples() {
        for case in [CounterexampleCase::Seq36, CounterexampleCase::Interval313] {
            let r = counterexample_divergence(case, 64).unwrap();
            assert_eq!((r.union_value, r.xor_sum, r.countably_additive), (Bit::ONE, Bit::ZERO, Bit::ZERO), "{case:?}");
            assert_eq!(r.detail.finitely_many_ones, Bit::ONE);
            assert_eq!(r.detail.xor_equality, Bit::ZERO);
            // depth-robust
            let shallow = counterexample_divergence(case, 1).unwrap();
            assert_eq!(shallow.countably_additive, Bit::ZERO);
        }
    }

    #[test]
    fn sup_at_infinity_diverges_on_unit_steps() {
        let r = counterexample_divergence(CounterexampleCase::SymSupTail, 64).unwrap();
        assert_eq!((r.union_value, r.xor_sum, r.countably_additive), (Bit::ONE, Bit::ZERO, Bit::ZERO));
    }

    #[test]
    fn interval_family_fills_the_unit_interval() {
        let (_, fam) = counterexample_family(CounterexampleCase::Interval313);
        let mut partial = SetValue::Elementary(ElementarySet::empty());
        for n in 0..20 {
            let SetValue::Elementary(a) = fam.member(n) else { unreachable!() };
            assert_eq!(a.parity_measure(), Bit::ZERO);
            partial = partial.union(&SetValue::Elementary(a));
            let rest = fam.union.difference(&partial);
            let gap = SetValue::Elementary(ElementarySet::open(qi(0), q(1, n as i128 + 2)));
            assert!(rest.same_set(&gap), "n={n}");
        }
        assert_eq!(CatalogMeasure::StepRingParity.eval(&fam.union).unwrap(), Bit::ONE);
    }

    #[test]
    fn elementary_parity_is_representation_free() {
        // [0,2) written two ways
        let a = ElementarySet::from_parts(&[(qi(0), qi(2))], &[qi(0)]);
        let b = ElementarySet::from_parts(&[(qi(0), qi(1)), (qi(1), qi(2))], &[qi(0), qi(1)]);
        assert_eq!(a, b);
        assert_eq!(a.parity_measure(), Bit::ZERO);
        assert_eq!(ElementarySet::open(qi(0), qi(2)).parity_measure(), Bit::ONE);
        assert_eq!(ElementarySet::point(qi(7)).parity_measure(), Bit::ONE);
    }

    #[test]
    fn elementary_ops_match_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let a = sample_elementary(&mut rng);
            let b = sample_elementary(&mut rng);
            let probes = elementary_probes(&[&a, &b]);
            for (r, op) in [
                (a.union(&b), (|x: bool, y: bool| x || y) as fn(bool, bool) -> bool),
                (a.intersection(&b), |x, y| x && y),
                (a.difference(&b), |x, y| x && !y),
                (a.sym_diff(&b), |x, y| x ^ y),
            ] {
                for &x in &probes {
                    assert_eq!(r.member(x), op(a.member(x), b.member(x)));
                }
            }
            // the parts form re-creates the set
            let (opens, points) = a.parts();
            assert_eq!(ElementarySet::from_parts(&opens, &points), a);
            // π(p + n) on the printed decomposition
            assert_eq!(parity(opens.len() + points.len()), a.parity_measure());
            assert_eq!(a.sym_diff(&b).parity_measure(), a.parity_measure() ^ b.parity_measure());
        }
    }

    #[test]
    fn restriction_agrees_on_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = SetValue::Points(FiniteSet::new([qi(0), qi(1), qi(2), q(1, 2)]));
        let mu = CatalogMeasure::DiracSum(FiniteSet::new([qi(1), q(1, 2), qi(5)]));
        let r = CatalogMeasure::Restriction(Box::new(mu.clone()), a.clone());
        for _ in 0..200 {
            let b = a.intersection(&sample_set(&Carrier::FiniteSets, &mut rng));
            assert_eq!(r.eval(&b).unwrap(), mu.eval(&b).unwrap());
        }
    }

    #[test]
    fn dirac_sum_is_xor_of_diracs() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let h = [qi(-1), q(1, 3), qi(2), q(7, 2)];
        let sum = CatalogMeasure::DiracSum(FiniteSet::new(h));
        for _ in 0..1000 {
            let carrier = if rng.gen_bool(0.5) { Carrier::FiniteSets } else { Carrier::SymIntervals };
            let s = sample_set(&carrier, &mut rng);
            let xor: Bit = h.iter().map(|x| CatalogMeasure::Dirac(*x).eval(&s).unwrap()).collect();
            assert_eq!(sum.eval(&s).unwrap(), xor);
        }
    }

    #[test]
    fn cofinite_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let h = CofiniteSet { missing: sample::finite_points(&mut rng, 8, 5, 2) };
            let star = CatalogMeasure::CofiniteStar.eval(&SetValue::Cofinite(h.clone())).unwrap();
            let fb = CatalogMeasure::FiniteBoolean.eval(&SetValue::Points(h.missing().clone())).unwrap();
            assert_eq!(star, !fb);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(CatalogMeasure::SymSup.eval(&pts(&[1])).is_err());
        let seq1 = SetValue::Sequence(BinarySequence::constant(Bit::ONE));
        assert!(CatalogMeasure::SeqXor.eval(&seq1).is_err());
        let step = SetValue::Step(BinaryStepFunction::indicator(qi(0), qi(1)));
        assert!(CatalogMeasure::IndicatorIntegral(Some((0.into(), 2.into()))).eval(&step).is_err());
        assert_eq!(
            CatalogMeasure::IndicatorIntegral(Some((2.into(), 3.into()))).eval(&step).unwrap(),
            Bit::ZERO
        );
        // (0,1] meets [1,3) in the single point 1
        let touching = CatalogMeasure::IndicatorIntegral(Some((1.into(), 3.into())));
        assert_eq!(touching.eval(&step).unwrap(), Bit::ONE);
    }

    #[test]
    fn every_measure_claim_passes_its_suite() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for m in representatives() {
            let suites = measure_suite(&m, &mut rng, 32, 200, 20).unwrap();
            for s in suites {
                match m.claim() {
                    Claim::AdditiveOnly => {
                        assert!(s.additivity_witness.is_none(), "{m}: {:?}", s.additivity_witness);
                    }
                    _ if m == CatalogMeasure::SymSup => {
                        assert!(s.passes(), "{m}: bounded chains only");
                    }
                    _ => assert!(s.passes(), "{m} on {}: {:?}", s.carrier, s),
                }
            }
        }
    }

    #[test]
    fn additive_only_measures_fail_exactly_xor_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (limit, fam) = counterexample_family(CounterexampleCase::Seq36);
        let r = check_countable_family(&limit, &fam, 64).unwrap();
        assert_eq!((r.finitely_many_ones, r.xor_equality), (Bit::ONE, Bit::ZERO));
        let suite = measure_suite(&CatalogMeasure::Limit, &mut rng, 16, 100, 5).unwrap();
        assert!(suite[0].countable_failures.iter().all(|f| f.starts_with("canonical basis")));
        assert_eq!(suite[0].countable_failures.len(), 1);
    }

    #[test]
    fn parse_specs() {
        let m = CatalogMeasure::parse("restriction(dirac_sum(0,1/2), [0,1))").unwrap();
        assert_eq!(m.to_string(), "restriction(dirac_sum(0,1/2), [0,1))");
        assert_eq!(CatalogMeasure::parse("sym-sup").unwrap(), CatalogMeasure::SymSup);
        assert!(matches!(CatalogMeasure::parse("lebesgue()"), Err(CatalogError::UnknownConstruction(_))));
        assert!(matches!(CatalogMeasure::parse("dirac(1,2)"), Err(CatalogError::BadParameters { .. })));
        let w = CatalogMeasure::parse("indicator_integral([0,2))").unwrap();
        assert_eq!(w, CatalogMeasure::IndicatorIntegral(Some((0.into(), 2.into()))));
        for m in representatives() {
            assert_eq!(CatalogMeasure::parse(&m.to_string()).unwrap(), m, "{m}");
        }
    }
}
