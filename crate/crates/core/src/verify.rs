//! The acceptance suite behind `verify all`: one check per criterion, the
//! catalog suites, the counterexamples and the parser round trips.
//!
//! Every check draws from its own ChaCha8 stream of the configured seed, so
//! the machine section depends on the configuration alone.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::b2::{Bit, Law, parity, truth_table};
use crate::carrier::{FiniteSet, SetLike};
use crate::catalog::{self, CatalogMeasure, Claim, CounterexampleCase, ElementarySet};
use crate::derivable::{
    self, BoxUnion, DerivableMeasure, LocallyFiniteSet, analytic_epsilon_sq, bx_member, derivative_at,
    derivative_support, mu_locfin, reconstruct_measure,
};
use crate::integration::{
    ConvergenceMode, FunctionSequence, MeasurableFunction, MeasurableSpace, RealFunction, SpaceMeasure, ae_equal,
    convergence_check, dual_left_integral, integral, left_integral, left_primitive,
};
use crate::interval::IntervalUnion;
use crate::literal;
use crate::ls::{Chain, LSMeasure, chain_family, ls_structured_countable_check};
use crate::rational::{ExtRational, Rational, abs, floor_int, q, qi};
use crate::sample;
use crate::set_function::{
    TabulatedSetFunction, additive_properties_report, additivity_report, is_additive_star,
};
use crate::set_ring::{FiniteUniverse, LawPair, SetRingFamily, SubsetMask};
use crate::step::{Point, SparsePointFunction};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliConfig {
    pub seed: u64,
    pub depth: usize,
    pub sample_count: usize,
    pub universe_cap: usize,
    pub dimension_cap: usize,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            seed: 1,
            depth: 64,
            sample_count: 1000,
            universe_cap: crate::set_ring::DEFAULT_UNIVERSE_CAP,
            dimension_cap: derivable::DEFAULT_DIMENSION_CAP,
        }
    }
}

impl CliConfig {
    pub fn validate(&self) -> Result<(), String> {
        let fields = [
            ("depth", self.depth),
            ("samples", self.sample_count),
            ("universe cap", self.universe_cap),
            ("dimension cap", self.dimension_cap),
        ];
        for (name, v) in fields {
            if v == 0 {
                return Err(format!("{name} must be positive"));
            }
        }
        Ok(())
    }
}

/// One `CHECK` line. A passing line may carry a note; a failing one always
/// carries a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub id: String,
    pub pass: bool,
    pub detail: Option<String>,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CHECK {} {}", self.id, if self.pass { "PASS" } else { "FAIL" })?;
        match &self.detail {
            Some(d) => write!(f, " {d}"),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<CheckLine>,
}

impl Report {
    /// The `CHECK` lines, sorted by id.
    pub fn machine(&self) -> String {
        self.checks.iter().map(|c| format!("{c}\n")).collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckLine> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() { 0 } else { 1 }
    }

    pub fn summary(&self) -> String {
        let failed = self.failures().count();
        format!("{} checks, {} passed, {failed} failed", self.checks.len(), self.checks.len() - failed)
    }
}

/// Ok carries an optional note, Err the failure witness.
pub type Outcome = Result<Option<String>, String>;

pub type CheckFn = fn(&CliConfig, &mut ChaCha8Rng) -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($w:tt)+) => {
        if !$cond {
            return Err(format!($($w)+));
        }
    };
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ac01(_: &CliConfig, _: &mut ChaCha8Rng) -> Outcome {
    let table = truth_table();
    ensure!(table.len() == 4, "table has {} rows", table.len());
    for row in &table {
        let (a, b) = (row.a.value(), row.b.value());
        let want = [1 - a, a.max(b), a * b, (a + b) % 2, 1 - (a + b) % 2];
        for (law, (got, w)) in Law::ALL.iter().zip(row.values.iter().zip(want)) {
            ensure!(got.value() == w, "{law}({a},{b}) = {got}, expected {w}");
        }
    }
    Ok(None)
}

fn three_point_ring() -> (FiniteUniverse, SetRingFamily) {
    let u = FiniteUniverse::numbered(3);
    (u.clone(), SetRingFamily::power_set(u, LawPair::DeltaCap))
}

fn tabulate(ring: &SetRingFamily, code: u8) -> TabulatedSetFunction {
    TabulatedSetFunction::from_fn(ring.clone(), |m| Bit::from_bool((code >> m.bits()) & 1 == 1))
}

/// Value tables of the GF(2)-linear functionals A ↦ |A ∩ W| mod 2.
fn linear_tables() -> BTreeSet<u8> {
    (0u32..8).map(|w| (0u32..8).fold(0u8, |acc, s| acc | ((((s & w).count_ones() % 2) as u8) << s))).collect()
}

fn ac02(_: &CliConfig, _: &mut ChaCha8Rng) -> Outcome {
    let (_, ring) = three_point_ring();
    let mut additive = BTreeSet::new();
    for code in 0..=255u8 {
        let r = additivity_report(&tabulate(&ring, code)).map_err(|e| format!("table {code:#010b}: {e}"))?;
        if r.verdict.is_one() {
            additive.insert(code);
        }
    }
    ensure!(additive.len() == 8, "{} additive functions", additive.len());
    let oracle = linear_tables();
    ensure!(additive == oracle, "additive tables {additive:?} differ from linear functionals {oracle:?}");
    Ok(None)
}

fn ac03(_: &CliConfig, _: &mut ChaCha8Rng) -> Outcome {
    let (_, ring) = three_point_ring();
    for code in linear_tables() {
        let mu = tabulate(&ring, code);
        let r = additive_properties_report(&mu).map_err(err)?;
        ensure!(r.items.len() == 3 && r.all_pass(), "table {code:#010b}: {:?}", r.items);
        let dual = mu.complement_transport();
        ensure!(dual.ring().law_pair() == LawPair::ThetaCup, "dual of {code:#010b} is not on a (Θ,∪) ring");
        ensure!(is_additive_star(&dual).map_err(err)?.is_one(), "dual of {code:#010b} is not additive*");
        let r = additive_properties_report(&dual).map_err(err)?;
        ensure!(r.items.len() == 3 && r.all_pass(), "dual of {code:#010b}: {:?}", r.items);
    }
    Ok(None)
}

fn ac04(cfg: &CliConfig, _: &mut ChaCha8Rng) -> Outcome {
    let r = catalog::counterexample_divergence(CounterexampleCase::Seq36, cfg.depth).map_err(err)?;
    let depth = cfg.depth.max(1);
    ensure!(r.union_value == Bit::ONE && r.xor_sum == Bit::ZERO && r.countably_additive == Bit::ZERO, "{r}");
    ensure!(r.disjoint_to_depth == depth, "{r}");
    // direct: e(n) have distinct single flips and tail 0, their union is 1
    let basis: Vec<_> = (0..depth as u64).map(catalog::BinarySequence::basis).collect();
    for (i, e) in basis.iter().enumerate() {
        ensure!(e.tail() == Bit::ZERO && e.flips().len() == 1 && e.get(i as u64) == Bit::ONE, "e({i}) = {e}");
    }
    let xor: Bit = basis.iter().map(catalog::limit_measure_eval).collect();
    let union = catalog::limit_measure_eval(&catalog::BinarySequence::constant(Bit::ONE));
    ensure!((union, xor) == (Bit::ONE, Bit::ZERO), "direct evaluation gives union {union}, xor {xor}");
    Ok(Some(r.to_string()))
}

fn ac05(cfg: &CliConfig, _: &mut ChaCha8Rng) -> Outcome {
    let r = catalog::counterexample_divergence(CounterexampleCase::Interval313, cfg.depth).map_err(err)?;
    ensure!(r.union_value == Bit::ONE && r.xor_sum == Bit::ZERO && r.countably_additive == Bit::ZERO, "{r}");
    // direct: each piece is a point plus a gap, the union one gap
    let count = |e: &ElementarySet| {
        let (opens, points) = e.parts();
        opens.len() + points.len()
    };
    for n in 0..cfg.depth.max(1) as i128 {
        let e = ElementarySet::left_closed(q(1, n + 2), q(1, n + 1));
        ensure!(count(&e) == 2, "piece {n} = {e}");
    }
    ensure!(count(&ElementarySet::open(qi(0), qi(1))) == 1, "(0,1) is not a single gap");
    Ok(Some(r.to_string()))
}

/// A random rational strictly inside the symmetric interval (a, b).
fn interior(rng: &mut ChaCha8Rng, a: ExtRational, b: ExtRational) -> Rational {
    use ExtRational::{Finite, NegInf, PosInf};
    let jump = |rng: &mut ChaCha8Rng| q(rng.gen_range(1..=32), rng.gen_range(1..=4));
    match (a, b) {
        (Finite(x), Finite(y)) => sample::between(rng, x, y),
        (NegInf, Finite(y)) => y - jump(rng),
        (Finite(x), PosInf) => x + jump(rng),
        _ => sample::rational(rng, 6, 4),
    }
}

/// A cut of every component at up to three interior points.
fn refine(rng: &mut ChaCha8Rng, comps: &[(ExtRational, ExtRational)]) -> Vec<(ExtRational, ExtRational)> {
    let mut out = Vec::new();
    for &(a, b) in comps {
        let k = rng.gen_range(0..=3);
        let mut cuts: Vec<Rational> = (0..k).map(|_| interior(rng, a, b)).collect();
        cuts.sort();
        cuts.dedup();
        let mut lo = a;
        for c in cuts {
            out.push((lo, ExtRational::Finite(c)));
            lo = ExtRational::Finite(c);
        }
        out.push((lo, b));
    }
    out
}

fn ac06(cfg: &CliConfig, rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..cfg.sample_count {
        let f = sample::step_function(rng, 6, 5);
        let raw = sample::raw_intervals(rng, 5, 5);
        let canon = IntervalUnion::delta_of(&raw);
        let mu = LSMeasure::new(f.clone());
        let v = mu.eval(&canon);
        ensure!(mu.endpoint_xor(&raw) == v, "f={f}: Δ-expression {raw:?} gives {} but {canon} gives {v}", !v);
        for _ in 0..3 {
            let r = refine(rng, canon.components());
            ensure!(IntervalUnion::union_of(&r) == canon, "refinement {r:?} of {canon} changes the set");
            ensure!(mu.endpoint_xor(&r) == v, "f={f}: refinement {r:?} of {canon} gives {}", !v);
        }
    }
    Ok(None)
}

/// One to three pairwise disjoint chains around a finite window [t0, b).
fn random_chains(rng: &mut ChaCha8Rng) -> Vec<Chain> {
    let t0 = sample::rational(rng, 5, 4);
    let b = t0 + q(rng.gen_range(1..=16), rng.gen_range(1..=4));
    let step = q(rng.gen_range(1..=8), rng.gen_range(1..=4));
    let mid = Chain::ToFinite { t0, b };
    match rng.gen_range(0..4) {
        0 => vec![mid],
        1 => vec![mid, Chain::ToInfinity { t0: b, step }],
        2 => vec![Chain::FromNegInfinity { b: t0, step }, mid],
        _ => vec![Chain::FromNegInfinity { b: t0, step }, mid, Chain::ToInfinity { t0: b, step }],
    }
}

fn ac07(cfg: &CliConfig, rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..100 {
        let f = sample::step_function(rng, 6, 5);
        let mu = LSMeasure::new(f.clone());
        for _ in 0..100 {
            let fam = chain_family(&f, random_chains(rng));
            let r = ls_structured_countable_check(&mu, &fam, cfg.depth).map_err(err)?;
            ensure!(
                r.finitely_many_ones.is_one() && r.xor_equality.is_one(),
                "f={f} family {} union {:?}: {}",
                fam.label,
                fam.union,
                r.witness.unwrap_or_default()
            );
        }
    }
    Ok(None)
}

fn finite_origin(rng: &mut ChaCha8Rng) -> ExtRational {
    match sample::endpoint(rng, 5, 4) {
        ExtRational::PosInf => ExtRational::NegInf,
        a => a,
    }
}

fn ac08(_: &CliConfig, rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..100 {
        let f = sample::step_function(rng, 6, 5);
        let origin = finite_origin(rng);
        let mu = LSMeasure::new(f.clone());
        let g = mu.cdf(origin);
        ensure!(g.eval(origin) == Bit::ZERO, "g({origin}) = 1 for f={f}");
        for _ in 0..100 {
            let c = sample::endpoint(rng, 6, 4);
            let d = sample::endpoint(rng, 6, 4);
            let lhs = g.eval(c) ^ g.eval(d);
            let rhs = mu.eval(&IntervalUnion::interval(c, d));
            ensure!(lhs == rhs, "f={f} origin={origin}: g(c)+g(d) = {lhs} but mu([[{c},{d}))) = {rhs}");
        }
    }
    Ok(None)
}

/// A ∩ H by brute force over the lattice points of the bounding box.
fn meet_oracle(h: &LocallyFiniteSet, a: &BoxUnion) -> FiniteSet<Point> {
    match h {
        LocallyFiniteSet::Finite { points, .. } => points.filter(|p| bx_member(a, &p.0)),
        LocallyFiniteSet::Lattice { scale, offset } => {
            let mut out = FiniteSet::empty();
            if a.is_empty() {
                return out;
            }
            let ranges: Vec<(i128, i128)> = (0..offset.len())
                .map(|i| {
                    let lo = a.boxes().iter().map(|b| b.lo()[i]).min().expect("non-empty");
                    let hi = a.boxes().iter().map(|b| b.hi()[i]).max().expect("non-empty");
                    (floor_int((lo - offset[i]) / *scale) - 1, floor_int((hi - offset[i]) / *scale) + 1)
                })
                .collect();
            let mut idx: Vec<i128> = ranges.iter().map(|r| r.0).collect();
            loop {
                let p = Point(idx.iter().zip(offset).map(|(k, o)| *o + *scale * qi(*k)).collect());
                if bx_member(a, &p.0) {
                    out.0.insert(p);
                }
                let mut axis = 0;
                while axis < idx.len() {
                    idx[axis] += 1;
                    if idx[axis] <= ranges[axis].1 {
                        break;
                    }
                    idx[axis] = ranges[axis].0;
                    axis += 1;
                }
                if axis == idx.len() {
                    return out;
                }
            }
        }
    }
}

fn test_sets(cfg: &CliConfig, rng: &mut ChaCha8Rng) -> Vec<LocallyFiniteSet> {
    let dims: Vec<usize> = (1..=cfg.dimension_cap.min(3)).collect();
    let mut hs: Vec<LocallyFiniteSet> =
        (0..20).map(|i| derivable::sample_finite_locfin(rng, dims[i % dims.len()], 8, 3)).collect();
    hs.extend((0..5).map(|i| derivable::sample_lattice(rng, dims[i % dims.len()])));
    hs
}

fn ac09(cfg: &CliConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let hs = test_sets(cfg, rng);
    for h in &hs {
        let mu = mu_locfin(h.clone());
        for _ in 0..cfg.sample_count {
            let a = derivable::sample_box_union(rng, h.dim(), 3, 3);
            let ds = derivative_support(&mu, &a).map_err(err)?;
            let oracle = meet_oracle(h, &a);
            ensure!(ds == oracle, "H={h} A={a}: support {} but A ∩ H has {} points", ds.len(), oracle.len());
            let v = mu.eval(&a).map_err(err)?;
            ensure!(parity(ds.len()) == v, "H={h} A={a}: parity {} but mu_H(A) = {v}", parity(ds.len()));
        }
    }
    for _ in 0..100 {
        let h = &hs[rng.gen_range(0..hs.len())];
        let mu = mu_locfin(h.clone());
        let a = derivable::sample_box_union(rng, h.dim(), 3, 3);
        let k = rng.gen_range(1..=4);
        let parts = derivable::sample_partition(rng, &a, k, 3);
        let mut union = BoxUnion::empty(h.dim());
        let mut xor = Bit::ZERO;
        for (i, p) in parts.iter().enumerate() {
            ensure!(union.is_disjoint(p), "partition of {a} overlaps at piece {i}");
            union = union.union(p);
            xor ^= mu.eval(p).map_err(err)?;
        }
        ensure!(union == a, "pieces of {a} unite to {union}");
        let v = mu.eval(&a).map_err(err)?;
        ensure!(xor == v, "H={h} A={a}: pieces give {xor}, mu_H(A) = {v}");
    }
    Ok(None)
}

/// The window [-4, 4)ⁿ, which holds every sampled set.
fn window(dim: usize) -> BoxUnion {
    BoxUnion::cuboid(&vec![(qi(-4), qi(4)); dim])
}

fn ac10(cfg: &CliConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let hs = test_sets(cfg, rng);
    let per = cfg.sample_count.div_ceil(hs.len());
    for h in &hs {
        let dim = h.dim();
        let mu_h = mu_locfin(h.clone());
        let g = SparsePointFunction::from_support(derivative_support(&mu_h, &window(dim)).map_err(err)?);
        let back = reconstruct_measure(&g, dim).map_err(err)?;
        if let LocallyFiniteSet::Finite { points, .. } = h {
            // dμ_g = g, read off by probing an opaque evaluation
            let outside: Vec<Point> =
                (0..100).map(|_| derivable::sample_point(rng, dim, 3, 5)).filter(|x| !points.contains(x)).collect();
            let all = LocallyFiniteSet::finite(dim, points.iter().cloned().chain(outside.iter().cloned()))
                .map_err(err)?;
            let tol = points
                .iter()
                .chain(&outside)
                .filter_map(|x| analytic_epsilon_sq(&all, x))
                .min()
                .unwrap_or(qi(1));
            let opaque_inner = back.clone();
            let opaque = DerivableMeasure::Declared {
                label: format!("opaque {h}"),
                dim,
                eval: Arc::new(move |a| opaque_inner.eval(a).expect("dimension matches")),
                tolerance_sq: tol,
            };
            for x in points.iter().chain(&outside) {
                let d = derivative_at(&opaque, x).map_err(err)?;
                ensure!(d == g.eval(x), "H={h}: probed derivative at {x} is {d}, g is {}", g.eval(x));
                ensure!(derivative_at(&back, x).map_err(err)? == g.eval(x), "H={h}: d(mu_g)({x}) differs from g");
            }
        }
        for _ in 0..per {
            let a = derivable::sample_box_union(rng, dim, 3, 3);
            let (v, w) = (mu_h.eval(&a).map_err(err)?, back.eval(&a).map_err(err)?);
            ensure!(v == w, "H={h} A={a}: mu_H = {v} but the reconstruction gives {w}");
        }
    }
    Ok(None)
}

fn ac11(cfg: &CliConfig, rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..cfg.sample_count {
        let supp = sample::finite_points(rng, 8, 5, 4);
        let f = SparsePointFunction::from_support(supp.clone());
        let rf = RealFunction::Sparse(f.clone());
        let a = finite_origin(rng);
        let p = left_primitive(&f, a);
        let c = sample::rational(rng, 6, 4);
        let d = c + abs(sample::rational(rng, 6, 4)) + q(1, 8);
        let (cx, dx) = (ExtRational::Finite(c), ExtRational::Finite(d));
        let ls = LSMeasure::new(p.clone()).eval(&IntervalUnion::interval(c, d));
        let li = left_integral(&rf, cx, dx).map_err(err)?;
        ensure!(ls == li, "f={f} a={a}: LS(F)([[{c},{d}))) = {ls} but the left integral is {li}");
        for &s in p.toggles() {
            let t = ExtRational::Finite(s);
            ensure!(p.eval(t) == p.left_limit(t), "primitive of {f} from {a} is not left-continuous at {s}");
        }
        let zeros = supp;
        let in_window = zeros.filter(|x| IntervalUnion::interval(c, d).member(*x).is_one());
        let not_f = RealFunction::Sparse(SparsePointFunction::from_support(in_window));
        let dual = dual_left_integral(&zeros, cx, dx);
        let via = !left_integral(&not_f, cx, dx).map_err(err)?;
        ensure!(dual == via, "zeros={zeros:?} on [[{c},{d})): dual {dual}, complement form {via}");
    }
    Ok(None)
}

fn ac12(_: &CliConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let (u, ring) = three_point_ring();
    let space = MeasurableSpace::Finite(ring.clone());
    let subsets = u.power_set();
    for code in linear_tables() {
        let mu = SpaceMeasure::Tabulated(tabulate(&ring, code));
        for &a in &subsets {
            for &b in &subsets {
                let (fa, fb) = (MeasurableFunction::Tabulated(a), MeasurableFunction::Tabulated(b));
                let ia = integral(&fa, &space, &mu).map_err(err)?;
                let ib = integral(&fb, &space, &mu).map_err(err)?;
                let sum = integral(&MeasurableFunction::Tabulated(a.sym_diff(&b)), &space, &mu).map_err(err)?;
                ensure!(sum == ia ^ ib, "mu {code:#010b}: ∫(f+g) = {sum}, ∫f + ∫g = {}", ia ^ ib);
                let prod = integral(&MeasurableFunction::Tabulated(a.intersection(&b)), &space, &mu).map_err(err)?;
                if b == u.full() {
                    ensure!(prod == ia, "mu {code:#010b}: ∫(1·f) differs from ∫f");
                }
                let r = ae_equal(&fa, &fb, &space, &mu).map_err(err)?;
                ensure!(r.coherent(), "mu {code:#010b}: a.e. readings disagree for {a:?}, {b:?}");
                ensure!(!r.ae_equal().is_one() || ia == ib, "mu {code:#010b}: f = g a.e. but ∫f = {ia}, ∫g = {ib}");
            }
        }
        // c·f for both constants
        for &a in &subsets {
            let zero = integral(&MeasurableFunction::Tabulated(u.empty().intersection(&a)), &space, &mu).map_err(err)?;
            ensure!(zero == Bit::ZERO, "mu {code:#010b}: ∫(0·f) = 1");
        }
    }
    shrinking_families(rng, 100)
}

/// Decreasing supports with empty intersection integrate to 0 eventually.
fn shrinking_families(rng: &mut ChaCha8Rng, count: usize) -> Outcome {
    for i in 0..count {
        let (seq, space, mu) = if i % 2 == 0 {
            let pts: Vec<Rational> = sample::finite_points(rng, 8, 5, 3).iter().copied().collect();
            let k = pts.len();
            let h = sample::finite_points(rng, 4, 5, 3);
            let mu = if rng.gen_bool(0.5) { CatalogMeasure::FiniteBoolean } else { CatalogMeasure::DiracSum(h) };
            let seq = FunctionSequence::new(
                "drop one point per step",
                move |n| MeasurableFunction::Sparse(SparsePointFunction::new(pts.iter().skip(n).copied())),
                MeasurableFunction::Sparse(SparsePointFunction::new([])),
                k,
            );
            (seq, MeasurableSpace::FiniteSubsets, SpaceMeasure::Catalog(mu))
        } else {
            let f = sample::step_function(rng, 6, 5);
            let a = sample::rational(rng, 5, 4);
            // [[a − 1/(n+1), a)) misses every toggle below a once 1/(n+1) < a − s
            let settle = f.toggles().iter().rfind(|s| **s < a).map_or(0, |s| floor_int(qi(1) / (a - *s)) + 1);
            let seq = FunctionSequence::new(
                "[[a - 1/(n+1), a))",
                move |n| MeasurableFunction::Intervals(IntervalUnion::interval(a - q(1, n as i128 + 1), a)),
                MeasurableFunction::Intervals(IntervalUnion::empty()),
                settle as usize,
            );
            (seq, MeasurableSpace::SymIntervals, SpaceMeasure::Ls(LSMeasure::new(f)))
        };
        let r = convergence_check(&seq, ConvergenceMode::Decreasing, &space, &mu, 32).map_err(err)?;
        ensure!(r.passes(), "{} under {mu}: {}", seq.label, r.witness.unwrap_or_default());
        ensure!(r.target_integral == Bit::ZERO, "{}: the limit integral is 1", seq.label);
    }
    Ok(None)
}

fn catalog_check(index: usize, cfg: &CliConfig, rng: &mut ChaCha8Rng) -> Outcome {
    let m = &catalog::representatives()[index];
    let suites = catalog::measure_suite(m, rng, cfg.depth, cfg.sample_count / 5 + 1, 20).map_err(err)?;
    let mut families = 0;
    for s in &suites {
        families += s.families;
        match m.claim() {
            Claim::AdditiveOnly => {
                ensure!(s.additivity_witness.is_none(), "{m} on {}: {}", s.carrier, s.additivity_witness.clone().unwrap_or_default());
            }
            _ => ensure!(s.passes(), "{m} on {}: {:?} {:?}", s.carrier, s.additivity_witness, s.countable_failures),
        }
    }
    Ok(Some(format!("{m} families={families}")))
}

fn counterexample_check(case: CounterexampleCase, cfg: &CliConfig) -> Outcome {
    let r = catalog::counterexample_divergence(case, cfg.depth).map_err(err)?;
    ensure!(
        r.countably_additive == Bit::ZERO && r.union_value != r.xor_sum,
        "{r}: the divergence did not reproduce"
    );
    Ok(Some(r.to_string()))
}

fn parse_round_trips(cfg: &CliConfig, rng: &mut ChaCha8Rng, kind: &str) -> Outcome {
    for _ in 0..cfg.sample_count {
        match kind {
            "interval" => {
                let v = sample::interval_union(rng, 6);
                ensure!(literal::parse_interval_union(&v.to_string()).ok() == Some(v.clone()), "{v}");
            }
            "points" => {
                let v = sample::finite_points(rng, 6, 5, 4);
                let s = literal::print_points(&v);
                ensure!(literal::parse_points(&s).ok() == Some(v), "{s}");
            }
            "stepfn" => {
                let v = sample::step_function(rng, 6, 5);
                ensure!(literal::parse_stepfn(&v.to_string()).ok() == Some(v.clone()), "{v}");
            }
            "family" | "tabfn" => {
                let n = rng.gen_range(1..=5.min(cfg.universe_cap));
                let u = FiniteUniverse::numbered(n);
                let k = rng.gen_range(0..=6);
                let masks: Vec<SubsetMask> = (0..k)
                    .map(|_| SubsetMask::new(rng.gen_range(0..1u32 << n), n).expect("fits the width"))
                    .collect();
                if kind == "family" {
                    let s = literal::print_family(&u, &masks);
                    ensure!(literal::parse_family(&s).ok() == Some((u, masks)), "{s}");
                } else {
                    let distinct: BTreeSet<SubsetMask> = masks.into_iter().collect();
                    let values: Vec<(SubsetMask, Bit)> =
                        distinct.into_iter().map(|m| (m, Bit::from_bool(rng.gen_bool(0.5)))).collect();
                    let s = literal::print_tabfn(&u, &values);
                    ensure!(literal::parse_tabfn(&s).ok() == Some((u, values)), "{s}");
                }
            }
            "box" => {
                let dim = rng.gen_range(1..=cfg.dimension_cap.min(3));
                let v = derivable::sample_box_union(rng, dim, 3, 4);
                let back = literal::parse_box_union(&v.to_string()).map(|b| b.with_dim(dim));
                ensure!(back.ok() == Some(v.clone()), "{v}");
            }
            "lattice" => {
                let dim = rng.gen_range(1..=cfg.dimension_cap.min(3));
                let v = derivable::sample_lattice(rng, dim);
                ensure!(literal::parse_locfin(&v.to_string()).ok() == Some(v.clone()), "{v}");
            }
            _ => return Err(format!("unknown literal kind {kind}")),
        }
    }
    Ok(None)
}

const LITERAL_KINDS: [&str; 7] = ["box", "family", "interval", "lattice", "points", "stepfn", "tabfn"];

/// The criteria checks that run standalone.
pub const CRITERIA: [(&str, CheckFn); 12] = [
    ("AC01", ac01),
    ("AC02", ac02),
    ("AC03", ac03),
    ("AC04", ac04),
    ("AC05", ac05),
    ("AC06", ac06),
    ("AC07", ac07),
    ("AC08", ac08),
    ("AC09", ac09),
    ("AC10", ac10),
    ("AC11", ac11),
    ("AC12", ac12),
];

/// Each check's own stream of the seed.
pub fn check_rng(cfg: &CliConfig, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    rng
}

fn line(id: String, outcome: Outcome) -> CheckLine {
    match outcome {
        Ok(note) => CheckLine { id, pass: true, detail: note },
        Err(w) => CheckLine { id, pass: false, detail: Some(if w.is_empty() { "no witness text".into() } else { w }) },
    }
}

pub fn run_criterion(id: &str, cfg: &CliConfig) -> Option<CheckLine> {
    let (k, (_, f)) = CRITERIA.iter().enumerate().find(|(_, (name, _))| *name == id)?;
    Some(line(id.to_string(), f(cfg, &mut check_rng(cfg, k as u64 + 1))))
}

type Job = Box<dyn FnOnce() -> CheckLine + Send>;

fn jobs(cfg: &CliConfig) -> Vec<Job> {
    let mut out: Vec<Job> = Vec::new();
    for (k, &(id, f)) in CRITERIA.iter().enumerate() {
        let cfg = cfg.clone();
        out.push(Box::new(move || line(id.to_string(), f(&cfg, &mut check_rng(&cfg, k as u64 + 1)))));
    }
    for (i, m) in catalog::representatives().iter().enumerate() {
        let cfg = cfg.clone();
        let id = format!("CAT-{i:02}-{}", m.name());
        out.push(Box::new(move || line(id, catalog_check(i, &cfg, &mut check_rng(&cfg, 100 + i as u64)))));
    }
    for case in CounterexampleCase::ALL {
        let cfg = cfg.clone();
        out.push(Box::new(move || line(format!("CEX-{}", case.id()), counterexample_check(case, &cfg))));
    }
    for (i, kind) in LITERAL_KINDS.into_iter().enumerate() {
        let cfg = cfg.clone();
        out.push(Box::new(move || {
            line(format!("PARSE-{kind}"), parse_round_trips(&cfg, &mut check_rng(&cfg, 200 + i as u64), kind))
        }));
    }
    out
}

/// Every check except the determinism criterion, sharded over threads and
/// sorted by id.
pub fn run_suite(cfg: &CliConfig) -> Report {
    let mut checks: Vec<CheckLine> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs(cfg).into_iter().map(|j| s.spawn(j)).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    Report { checks }
}

pub const SUITE_BUDGET: Duration = Duration::from_secs(60);

/// The full suite, run twice: the determinism criterion compares the two
/// machine sections and bounds the time of one run.
pub fn verify_all(cfg: &CliConfig) -> Report {
    let start = Instant::now();
    let first = run_suite(cfg);
    let elapsed = start.elapsed();
    let second = run_suite(cfg);
    let outcome = if first.machine() != second.machine() {
        let diff = first
            .checks
            .iter()
            .zip(&second.checks)
            .find(|(a, b)| a != b)
            .map(|(a, b)| format!("`{a}` then `{b}`"))
            .unwrap_or_else(|| "different check counts".into());
        Err(format!("two runs differ: {diff}"))
    } else if elapsed > SUITE_BUDGET {
        Err(format!("one run took {:.1} s", elapsed.as_secs_f64()))
    } else {
        Ok(None)
    };
    let mut checks = first.checks;
    checks.push(line("AC13".into(), outcome));
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    Report { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CliConfig {
        CliConfig { depth: 16, sample_count: 40, ..CliConfig::default() }
    }

    #[test]
    fn lines_render() {
        let pass = CheckLine { id: "AC01".into(), pass: true, detail: None };
        assert_eq!(pass.to_string(), "CHECK AC01 PASS");
        let fail = line("X".into(), Err(String::new()));
        assert!(!fail.pass && fail.detail.is_some());
    }

    #[test]
    fn config_validation() {
        assert!(CliConfig::default().validate().is_ok());
        assert!(CliConfig { depth: 0, ..CliConfig::default() }.validate().is_err());
    }

    #[test]
    fn small_suite_passes_and_is_sorted() {
        let r = run_suite(&small());
        assert!(r.passed(), "{}", r.machine());
        let ids: Vec<_> = r.checks.iter().map(|c| c.id.clone()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn counterexamples_survive_depth_one() {
        let cfg = CliConfig { depth: 1, ..small() };
        for case in CounterexampleCase::ALL {
            assert!(counterexample_check(case, &cfg).is_ok(), "{}", case.id());
        }
        assert!(ac04(&cfg, &mut check_rng(&cfg, 0)).is_ok());
        assert!(ac05(&cfg, &mut check_rng(&cfg, 0)).is_ok());
    }

    #[test]
    fn lattice_oracle_counts() {
        let h = LocallyFiniteSet::lattice(qi(1), vec![qi(0), qi(0)]).unwrap();
        let a = BoxUnion::cuboid(&[(qi(0), qi(2)), (q(-1, 2), q(1, 2))]);
        assert_eq!(meet_oracle(&h, &a).len(), 2);
    }
}
