//! Seeded random generators for every carrier. All randomness in checks and
//! reports flows from these and a caller-supplied RNG.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::seq::SliceRandom;

use crate::b2::Bit;
use crate::carrier::FiniteSet;
use crate::interval::IntervalUnion;
use crate::rational::{ExtRational, Rational, q};
use crate::step::BinaryStepFunction;

/// Rational n/d with |n| ≤ span·d and d ∈ 1..=max_den.
pub fn rational<R: Rng + ?Sized>(rng: &mut R, span: i128, max_den: i128) -> Rational {
    let d = rng.gen_range(1..=max_den);
    let n = rng.gen_range(-span * d..=span * d);
    q(n, d)
}

/// Extended endpoint, infinite with probability about 1/8 each side.
pub fn endpoint<R: Rng + ?Sized>(rng: &mut R, span: i128, max_den: i128) -> ExtRational {
    match rng.gen_range(0..16) {
        0 => ExtRational::NegInf,
        1 => ExtRational::PosInf,
        _ => ExtRational::Finite(rational(rng, span, max_den)),
    }
}

/// Rational strictly between a and b.
pub fn between<R: Rng + ?Sized>(rng: &mut R, a: Rational, b: Rational) -> Rational {
    let k = rng.gen_range(1..=63);
    a + (b - a) * q(k, 64)
}

pub fn raw_intervals<R: Rng + ?Sized>(rng: &mut R, max_len: usize, span: i128) -> Vec<(ExtRational, ExtRational)> {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| (endpoint(rng, span, 4), endpoint(rng, span, 4))).collect()
}

pub fn interval_union<R: Rng + ?Sized>(rng: &mut R, span: i128) -> IntervalUnion {
    IntervalUnion::delta_of(&raw_intervals(rng, 5, span))
}

/// Bounded interval union with finite endpoints.
pub fn bounded_interval_union<R: Rng + ?Sized>(rng: &mut R, span: i128) -> IntervalUnion {
    let n = rng.gen_range(0..=4);
    let raw: Vec<_> = (0..n)
        .map(|_| (ExtRational::Finite(rational(rng, span, 4)), ExtRational::Finite(rational(rng, span, 4))))
        .collect();
    IntervalUnion::delta_of(&raw)
}

pub fn step_function<R: Rng + ?Sized>(rng: &mut R, max_toggles: usize, span: i128) -> BinaryStepFunction {
    let n = rng.gen_range(0..=max_toggles);
    let toggles: Vec<Rational> = (0..n).map(|_| rational(rng, span, 6)).collect();
    BinaryStepFunction::normalize(Bit::from_bool(rng.gen_bool(0.5)), toggles)
}

pub fn finite_points<R: Rng + ?Sized>(rng: &mut R, max_len: usize, span: i128, max_den: i128) -> FiniteSet<Rational> {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| rational(rng, span, max_den)).collect()
}

/// Splits `points` into `parts` pairwise disjoint blocks (some possibly empty).
pub fn partition<R: Rng + ?Sized, P: Ord + Clone>(rng: &mut R, points: &FiniteSet<P>, parts: usize) -> Vec<FiniteSet<P>> {
    let mut blocks: Vec<BTreeSet<P>> = vec![BTreeSet::new(); parts.max(1)];
    for p in points.iter() {
        let k = rng.gen_range(0..blocks.len());
        blocks[k].insert(p.clone());
    }
    blocks.into_iter().map(FiniteSet).collect()
}

/// Eventually constant binary sequence: overrides among indices < horizon.
pub fn sequence_parts<R: Rng + ?Sized>(rng: &mut R, horizon: u64, allow_tail_one: bool) -> (BTreeMap<u64, Bit>, Bit) {
    let tail = Bit::from_bool(allow_tail_one && rng.gen_bool(0.5));
    let k = rng.gen_range(0..=horizon.min(8));
    let overrides = (0..k).map(|_| (rng.gen_range(0..horizon), Bit::from_bool(rng.gen_bool(0.5)))).collect();
    (overrides, tail)
}

/// A random sample of `k` distinct elements of `pool`.
pub fn choose<R: Rng + ?Sized, T: Clone>(rng: &mut R, pool: &[T], k: usize) -> Vec<T> {
    pool.choose_multiple(rng, k.min(pool.len())).cloned().collect()
}
