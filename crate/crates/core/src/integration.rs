//! Measurable spaces, the integral ∫ f dμ = μ(supp f), convergence of
//! function sequences, and the Riemann-style integrals with their
//! primitives on R.

use std::fmt;

use thiserror::Error;

use crate::b2::{Bit, parity};
use crate::carrier::{FiniteSet, SetLike};
use crate::catalog::{CatalogMeasure, SetValue, step_window_points};
use crate::derivable::{BoxUnion, DerivableMeasure};
use crate::interval::IntervalUnion;
use crate::ls::LSMeasure;
use crate::rational::{ExtRational, Rational};
use crate::set_function::{DomainError, TabulatedSetFunction};
use crate::set_ring::{SetRingFamily, SubsetMask};
use crate::step::{BinaryStepFunction, SparsePointFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntegrationError {
    #[error("{function} is not measurable in {space}")]
    NotMeasurable { function: String, space: String },
    #[error("not integrable: A ∩ supp f = {0} is not a measurable set")]
    NotIntegrable(String),
    #[error("not Riemann integrable on {window}: supp f meets it in an interval")]
    NotRiemannIntegrable { window: String },
    #[error("the dual integral needs finitely many zeros in the window")]
    NotDualIntegrable,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("{0}")]
    Derivable(String),
    #[error("query {0} leaves the ring of bounded interval unions")]
    OutsideBoundedRing(String),
    #[error("{measure} does not act on {set}")]
    MeasureMismatch { measure: String, set: String },
}

/// A set of one of the supported spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    Mask(SubsetMask),
    Points(FiniteSet<Rational>),
    Intervals(IntervalUnion),
    Boxes(BoxUnion),
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Mask(m) => write!(f, "mask {:#b}", m.bits()),
            Support::Points(p) => write!(f, "{}", SetValue::Points(p.clone())),
            Support::Intervals(u) => u.fmt(f),
            Support::Boxes(b) => b.fmt(f),
        }
    }
}

fn mismatch(a: &Support, b: &Support) -> ! {
    panic!("set operation across spaces: {a} and {b}")
}

macro_rules! support_op {
    ($name:ident) => {
        fn $name(&self, other: &Self) -> Self {
            match (self, other) {
                (Support::Mask(a), Support::Mask(b)) => Support::Mask(a.$name(b)),
                (Support::Points(a), Support::Points(b)) => Support::Points(a.$name(b)),
                (Support::Intervals(a), Support::Intervals(b)) => Support::Intervals(a.$name(b)),
                (Support::Boxes(a), Support::Boxes(b)) => Support::Boxes(a.$name(b)),
                _ => mismatch(self, other),
            }
        }
    };
}

impl SetLike for Support {
    fn empty_like(&self) -> Self {
        match self {
            Support::Mask(m) => Support::Mask(m.empty_like()),
            Support::Points(_) => Support::Points(FiniteSet::empty()),
            Support::Intervals(_) => Support::Intervals(IntervalUnion::empty()),
            Support::Boxes(b) => Support::Boxes(b.empty_like()),
        }
    }
    fn is_empty(&self) -> bool {
        match self {
            Support::Mask(m) => m.is_empty(),
            Support::Points(p) => p.is_empty(),
            Support::Intervals(u) => u.is_empty(),
            Support::Boxes(b) => b.is_empty(),
        }
    }
    support_op!(union);
    support_op!(intersection);
    support_op!(difference);
    support_op!(sym_diff);
}

/// A pair (X, U).
#[derive(Clone, Debug)]
pub enum MeasurableSpace {
    /// A finite universe with a tabulated ring.
    Finite(SetRingFamily),
    /// R with the finite subsets.
    FiniteSubsets,
    /// R with the symmetric interval unions.
    SymIntervals,
    /// Rⁿ with bounded box unions.
    Boxes(usize),
}

impl fmt::Display for MeasurableSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurableSpace::Finite(r) => write!(f, "finite universe of {} points ({})", r.universe().len(), r.law_pair()),
            MeasurableSpace::FiniteSubsets => f.write_str("(R, finite subsets)"),
            MeasurableSpace::SymIntervals => f.write_str("(R, symmetric interval unions)"),
            MeasurableSpace::Boxes(n) => write!(f, "(R^{n}, bounded box unions)"),
        }
    }
}

impl MeasurableSpace {
    /// Whether a set already in the space's representation lies in its ring.
    fn admits(&self, s: &Support) -> bool {
        match (self, s) {
            (MeasurableSpace::Finite(r), Support::Mask(m)) => r.contains(*m),
            (MeasurableSpace::FiniteSubsets, Support::Points(_)) => true,
            (MeasurableSpace::SymIntervals, Support::Intervals(_)) => true,
            (MeasurableSpace::Boxes(n), Support::Boxes(b)) => b.is_empty() || b.dim() == *n,
            _ => false,
        }
    }

    /// Re-expresses an empty set in the space's own representation.
    fn normalize(&self, s: Support) -> Support {
        if !s.is_empty() {
            return s;
        }
        match self {
            MeasurableSpace::Finite(r) => Support::Mask(r.universe().empty()),
            MeasurableSpace::FiniteSubsets => Support::Points(FiniteSet::empty()),
            MeasurableSpace::SymIntervals => Support::Intervals(IntervalUnion::empty()),
            MeasurableSpace::Boxes(n) => Support::Boxes(BoxUnion::empty(*n)),
        }
    }
}

/// A binary function, described by its support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeasurableFunction {
    /// Characteristic function of a subset of a finite universe.
    Tabulated(SubsetMask),
    Sparse(SparsePointFunction<Rational>),
    /// Left-continuous step function.
    Step(BinaryStepFunction),
    /// Indicator of a symmetric interval union.
    Intervals(IntervalUnion),
    /// Indicator of a box union.
    Boxes(BoxUnion),
}

impl fmt::Display for MeasurableFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasurableFunction::Tabulated(m) => write!(f, "indicator of mask {:#b}", m.bits()),
            MeasurableFunction::Sparse(s) => s.fmt(f),
            MeasurableFunction::Step(s) => s.fmt(f),
            MeasurableFunction::Intervals(u) => write!(f, "indicator of {u}"),
            MeasurableFunction::Boxes(b) => write!(f, "indicator of {b}"),
        }
    }
}

/// A ∩ {g = 1} for a step function g against an interval union, as a
/// symmetric interval union when it is one, else as points when finite.
fn step_meet_intervals(g: &BinaryStepFunction, a: &IntervalUnion) -> Option<Support> {
    let pieces: Vec<(ExtRational, ExtRational)> = g.support_pieces();
    let candidate = IntervalUnion::union_of(&pieces).intersection(a);
    let mut breaks: Vec<Rational> = g.toggles().to_vec();
    breaks.extend(a.endpoints().into_iter().filter_map(ExtRational::finite));
    if breaks.iter().all(|x| (g.at(*x) & a.member(*x)) == candidate.member(*x)) {
        return Some(Support::Intervals(candidate));
    }
    // the two differ at a breakpoint, so the meet is not half-open; it can
    // still be finite
    let mut touched = FiniteSet::empty();
    for &(lo, hi) in a.components() {
        let window = IntervalUnion::interval(lo, hi);
        step_window_points(g, &window)?;
        for &x in &breaks {
            if g.at(x).is_one() && window.member(x).is_one() {
                touched.0.insert(x);
            }
        }
    }
    Some(Support::Points(touched))
}

impl MeasurableFunction {
    /// A ∩ supp f in a representable form, if it has one.
    pub fn meet(&self, a: &Support) -> Option<Support> {
        use MeasurableFunction as F;
        Some(match (self, a) {
            (F::Tabulated(m), Support::Mask(x)) => Support::Mask(m.intersection(x)),
            (F::Sparse(f), Support::Points(p)) => Support::Points(f.support().intersection(p)),
            (F::Sparse(f), Support::Intervals(u)) => Support::Points(f.support().filter(|x| u.member(*x).is_one())),
            (F::Step(g), Support::Points(p)) => Support::Points(p.filter(|x| g.at(*x).is_one())),
            (F::Step(g), Support::Intervals(u)) => return step_meet_intervals(g, u),
            (F::Intervals(v), Support::Points(p)) => Support::Points(p.filter(|x| v.member(*x).is_one())),
            (F::Intervals(v), Support::Intervals(u)) => Support::Intervals(v.intersection(u)),
            (F::Boxes(b), Support::Boxes(x)) => Support::Boxes(b.intersection(x)),
            _ => return None,
        })
    }

    /// supp f in the space's representation, if it belongs to the ring.
    pub fn support_in(&self, space: &MeasurableSpace) -> Option<Support> {
        use MeasurableFunction as F;
        let s = match (self, space) {
            (F::Tabulated(m), MeasurableSpace::Finite(_)) => Support::Mask(*m),
            (F::Sparse(f), _) => Support::Points(f.support().clone()),
            (F::Step(g), MeasurableSpace::SymIntervals) => step_meet_intervals(g, &IntervalUnion::full())?,
            (F::Step(g), _) => {
                if !SetLike::is_empty(g) {
                    return None;
                }
                Support::Points(FiniteSet::empty())
            }
            (F::Intervals(u), _) => Support::Intervals(u.clone()),
            (F::Boxes(b), _) => Support::Boxes(b.clone()),
            (F::Tabulated(_), _) => return None,
        };
        let s = space.normalize(s);
        space.admits(&s).then_some(s)
    }
}

/// 1 iff supp f lies in the ring of the space.
pub fn is_measurable(f: &MeasurableFunction, space: &MeasurableSpace) -> Bit {
    Bit::from_bool(f.support_in(space).is_some())
}

/// A measure on one of the spaces.
#[derive(Clone, Debug)]
pub enum SpaceMeasure {
    Tabulated(TabulatedSetFunction),
    Catalog(CatalogMeasure),
    Ls(LSMeasure),
    Derivable(DerivableMeasure),
    Indefinite(IndefiniteIntegral),
}

impl SpaceMeasure {
    pub fn eval(&self, s: &Support) -> Result<Bit, IntegrationError> {
        let bad = || IntegrationError::MeasureMismatch { measure: self.to_string(), set: s.to_string() };
        match (self, s) {
            (SpaceMeasure::Tabulated(t), Support::Mask(m)) => Ok(t.value(*m).ok_or_else(bad)?),
            (SpaceMeasure::Catalog(c), Support::Points(p)) => Ok(c.eval(&SetValue::Points(p.clone()))?),
            (SpaceMeasure::Catalog(c), Support::Intervals(u)) => Ok(c.eval(&SetValue::Intervals(u.clone()))?),
            (SpaceMeasure::Ls(m), Support::Intervals(u)) => Ok(m.eval(u)),
            (SpaceMeasure::Derivable(d), Support::Boxes(b)) => {
                d.eval(b).map_err(|e| IntegrationError::Derivable(e.to_string()))
            }
            (SpaceMeasure::Indefinite(i), Support::Intervals(u)) => i.eval(u),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for SpaceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceMeasure::Tabulated(_) => f.write_str("tabulated measure"),
            SpaceMeasure::Catalog(c) => c.fmt(f),
            SpaceMeasure::Ls(m) => write!(f, "LS({})", m.integrator()),
            SpaceMeasure::Derivable(d) => write!(f, "{d:?}"),
            SpaceMeasure::Indefinite(i) => write!(f, "indefinite integral of {}", i.f),
        }
    }
}

/// ∫ f dμ = μ(supp f).
pub fn integral(f: &MeasurableFunction, space: &MeasurableSpace, mu: &SpaceMeasure) -> Result<Bit, IntegrationError> {
    let s = f.support_in(space).ok_or_else(|| IntegrationError::NotMeasurable {
        function: f.to_string(),
        space: space.to_string(),
    })?;
    mu.eval(&s)
}

/// ∫_A f dμ = μ(A ∩ supp f), defined when A ∩ supp f is measurable.
pub fn integral_on(
    a: &Support,
    f: &MeasurableFunction,
    space: &MeasurableSpace,
    mu: &SpaceMeasure,
) -> Result<Bit, IntegrationError> {
    let meet = f.meet(a).map(|s| space.normalize(s));
    match meet {
        Some(s) if space.admits(&s) => mu.eval(&s),
        Some(s) => Err(IntegrationError::NotIntegrable(s.to_string())),
        None => Err(IntegrationError::NotIntegrable(format!("{a} ∩ supp({f})"))),
    }
}

/// Both readings of almost-everywhere equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AeReport {
    /// μ(supp f Δ supp g) = 0
    pub by_difference: Bit,
    /// μ(supp f) = μ(supp g)
    pub by_values: Bit,
}

impl AeReport {
    /// The difference reading, which forces the value reading for additive μ.
    pub fn ae_equal(&self) -> Bit {
        self.by_difference
    }

    pub fn coherent(&self) -> bool {
        !self.by_difference.is_one() || self.by_values.is_one()
    }
}

pub fn ae_equal(
    f: &MeasurableFunction,
    g: &MeasurableFunction,
    space: &MeasurableSpace,
    mu: &SpaceMeasure,
) -> Result<AeReport, IntegrationError> {
    let not_measurable =
        |h: &MeasurableFunction| IntegrationError::NotMeasurable { function: h.to_string(), space: space.to_string() };
    let sf = f.support_in(space).ok_or_else(|| not_measurable(f))?;
    let sg = g.support_in(space).ok_or_else(|| not_measurable(g))?;
    let diff = space.normalize(sf.sym_diff(&sg));
    Ok(AeReport { by_difference: !mu.eval(&diff)?, by_values: !(mu.eval(&sf)? ^ mu.eval(&sg)?) })
}

/// (f·μ)(A) = μ(A ∩ supp f).
pub struct FTimesMu<'a> {
    pub f: MeasurableFunction,
    pub space: &'a MeasurableSpace,
    pub mu: &'a SpaceMeasure,
}

pub fn f_mu<'a>(f: &MeasurableFunction, space: &'a MeasurableSpace, mu: &'a SpaceMeasure) -> FTimesMu<'a> {
    FTimesMu { f: f.clone(), space, mu }
}

impl FTimesMu<'_> {
    pub fn eval(&self, a: &Support) -> Result<Bit, IntegrationError> {
        integral_on(a, &self.f, self.space, self.mu)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceMode {
    Increasing,
    Decreasing,
    InMeasure,
}

impl std::str::FromStr for ConvergenceMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "increasing" => Ok(ConvergenceMode::Increasing),
            "decreasing" => Ok(ConvergenceMode::Decreasing),
            "in_measure" | "in-measure" => Ok(ConvergenceMode::InMeasure),
            _ => Err(format!("unknown mode `{s}` (expected increasing, decreasing, in_measure)")),
        }
    }
}

type FnProducer = Box<dyn Fn(usize) -> MeasurableFunction + Send + Sync>;

/// (f_n) with a target and the index from which ∫ f_n is certified to
/// equal ∫ f.
pub struct FunctionSequence {
    pub label: String,
    produce: FnProducer,
    pub target: MeasurableFunction,
    pub settle: usize,
}

impl FunctionSequence {
    pub fn new(
        label: impl Into<String>,
        produce: impl Fn(usize) -> MeasurableFunction + Send + Sync + 'static,
        target: MeasurableFunction,
        settle: usize,
    ) -> Self {
        FunctionSequence { label: label.into(), produce: Box::new(produce), target, settle }
    }

    pub fn member(&self, n: usize) -> MeasurableFunction {
        (self.produce)(n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub chain_ok: bool,
    pub integrals: Vec<Bit>,
    pub target_integral: Bit,
    pub converged: bool,
    pub witness: Option<String>,
}

impl ConvergenceReport {
    pub fn passes(&self) -> bool {
        self.chain_ok && self.converged
    }
}

/// Checks the support chain for the mode up to `depth`, then that the
/// integrals agree with ∫ f from the certified index on.
pub fn convergence_check(
    seq: &FunctionSequence,
    mode: ConvergenceMode,
    space: &MeasurableSpace,
    mu: &SpaceMeasure,
    depth: usize,
) -> Result<ConvergenceReport, IntegrationError> {
    let depth = depth.max(seq.settle + 1);
    let not_measurable =
        |h: &MeasurableFunction| IntegrationError::NotMeasurable { function: h.to_string(), space: space.to_string() };
    let target = seq.target.support_in(space).ok_or_else(|| not_measurable(&seq.target))?;
    let target_integral = mu.eval(&target)?;
    let mut witness = None;
    let mut integrals = Vec::with_capacity(depth);
    let mut prev: Option<Support> = None;
    for n in 0..depth {
        let f = seq.member(n);
        let s = f.support_in(space).ok_or_else(|| not_measurable(&f))?;
        if witness.is_none() {
            witness = match mode {
                ConvergenceMode::Increasing if !s.is_subset(&target) => Some(format!("supp f_{n} not inside supp f")),
                ConvergenceMode::Increasing if prev.as_ref().is_some_and(|p| !p.is_subset(&s)) => {
                    Some(format!("supp f_{} not inside supp f_{n}", n - 1))
                }
                ConvergenceMode::Decreasing if !target.is_subset(&s) => Some(format!("supp f not inside supp f_{n}")),
                ConvergenceMode::Decreasing if prev.as_ref().is_some_and(|p| !s.is_subset(p)) => {
                    Some(format!("supp f_{n} not inside supp f_{}", n - 1))
                }
                _ => None,
            };
        }
        integrals.push(mu.eval(&s)?);
        prev = Some(s);
    }
    let chain_ok = witness.is_none();
    let first_off = (seq.settle..depth).find(|&n| integrals[n] != target_integral);
    if let (None, Some(n)) = (&witness, first_off) {
        witness = Some(format!("integral of f_{n} is {} but the limit integral is {target_integral}", integrals[n]));
    }
    Ok(ConvergenceReport { chain_ok, integrals, target_integral, converged: first_off.is_none(), witness })
}

/// A function of one real variable for the Riemann-style integrals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealFunction {
    Sparse(SparsePointFunction<Rational>),
    Step(BinaryStepFunction),
}

impl fmt::Display for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealFunction::Sparse(s) => s.fmt(f),
            RealFunction::Step(s) => s.fmt(f),
        }
    }
}

/// |A ∩ supp f| when finite.
fn window_count(f: &RealFunction, a: &IntervalUnion) -> Option<usize> {
    match f {
        RealFunction::Sparse(s) => Some(s.support().iter().filter(|x| a.member(**x).is_one()).count()),
        RealFunction::Step(g) => step_window_points(g, a),
    }
}

/// 1 iff A ∩ supp f is finite.
pub fn riemann_integrable(f: &RealFunction, a: &IntervalUnion) -> Bit {
    Bit::from_bool(window_count(f, a).is_some())
}

/// π(|A ∩ supp f|), the XOR of f over A.
pub fn riemann_integral(f: &RealFunction, a: &IntervalUnion) -> Result<Bit, IntegrationError> {
    window_count(f, a)
        .map(parity)
        .ok_or_else(|| IntegrationError::NotRiemannIntegrable { window: a.to_string() })
}

/// The left integral from a to b, over [[a, b)).
pub fn left_integral(f: &RealFunction, a: ExtRational, b: ExtRational) -> Result<Bit, IntegrationError> {
    riemann_integral(f, &IntervalUnion::interval(a, b))
}

/// The integral over R, which needs finite total support.
pub fn full_integral(f: &RealFunction) -> Result<Bit, IntegrationError> {
    riemann_integral(f, &IntervalUnion::full())
}

/// F(t) = π(|[[a, t)) ∩ supp f|): toggles at every support point, and the
/// start value counts the support points below a (they lie in [[a, t)) for
/// t below them).
pub fn left_primitive(f: &SparsePointFunction<Rational>, a: ExtRational) -> BinaryStepFunction {
    let below = f.support().iter().filter(|s| ExtRational::Finite(**s) < a).count();
    BinaryStepFunction::normalize(parity(below), f.support().iter().copied())
}

/// The algebraic dual ⊗_{x ∈ [[a,b))} f(x) for f = 0 exactly on Z.
pub fn dual_left_integral(zeros: &FiniteSet<Rational>, a: ExtRational, b: ExtRational) -> Bit {
    let w = IntervalUnion::interval(a, b);
    !parity(zeros.iter().filter(|x| w.member(**x).is_one()).count())
}

/// The indefinite integral A ↦ π(|A ∩ supp f|) on the bounded interval
/// unions generated by [[a, b)) with finite a, b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndefiniteIntegral {
    pub f: SparsePointFunction<Rational>,
}

impl IndefiniteIntegral {
    pub fn new(f: SparsePointFunction<Rational>) -> Self {
        IndefiniteIntegral { f }
    }

    pub fn eval(&self, a: &IntervalUnion) -> Result<Bit, IntegrationError> {
        if !a.is_bounded() {
            return Err(IntegrationError::OutsideBoundedRing(a.to_string()));
        }
        Ok(parity(self.f.support().iter().filter(|x| a.member(**x).is_one()).count()))
    }
}
