//! The ring of finite unions of symmetric intervals [[a, b)) over the
//! extended rational line.
//!
//! [[a, b)) is [a, b) when a < b, [b, a) when b < a and ∅ when a = b. The
//! carrier is R: ±∞ may be endpoints but are never members.

use std::fmt;

use crate::b2::{Bit, Law};
use crate::carrier::SetLike;
use crate::rational::{ExtRational, Rational};

/// Canonical union of half-open intervals: `a_i < b_i < a_{i+1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalUnion {
    components: Vec<(ExtRational, ExtRational)>,
}

/// How a raw list of intervals is combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combine {
    UnionOf,
    DeltaOf,
}

/// Orders the endpoints of [[a, b)); `None` for the empty a = b case.
pub fn symmetric(a: ExtRational, b: ExtRational) -> Option<(ExtRational, ExtRational)> {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Some((a, b)),
        std::cmp::Ordering::Greater => Some((b, a)),
        std::cmp::Ordering::Equal => None,
    }
}

/// Canonical form of the union (or iterated symmetric difference) of the
/// symmetric intervals in `raw`.
pub fn normalize(raw: &[(ExtRational, ExtRational)], mode: Combine) -> IntervalUnion {
    let mut pieces: Vec<(ExtRational, ExtRational)> =
        raw.iter().filter_map(|&(a, b)| symmetric(a, b)).collect();
    match mode {
        Combine::UnionOf => {
            pieces.sort();
            let mut out: Vec<(ExtRational, ExtRational)> = Vec::with_capacity(pieces.len());
            for (a, b) in pieces {
                match out.last_mut() {
                    Some(last) if a <= last.1 => last.1 = last.1.max(b),
                    _ => out.push((a, b)),
                }
            }
            IntervalUnion { components: out }
        }
        Combine::DeltaOf => {
            let mut ends: Vec<ExtRational> = pieces.iter().flat_map(|&(a, b)| [a, b]).collect();
            ends.sort();
            let toggles = cancel_pairs(ends);
            let components = toggles.chunks_exact(2).map(|c| (c[0], c[1])).collect();
            IntervalUnion { components }
        }
    }
}

/// Drops values occurring an even number of times from a sorted list.
pub(crate) fn cancel_pairs<T: PartialEq + Copy>(sorted: Vec<T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(sorted.len());
    for x in sorted {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { components: Vec::new() }
    }

    /// The single symmetric interval [[a, b)).
    pub fn interval(a: impl Into<ExtRational>, b: impl Into<ExtRational>) -> Self {
        normalize(&[(a.into(), b.into())], Combine::UnionOf)
    }

    /// The whole line (−∞, ∞).
    pub fn full() -> Self {
        IntervalUnion { components: vec![(ExtRational::NegInf, ExtRational::PosInf)] }
    }

    pub fn union_of(raw: &[(ExtRational, ExtRational)]) -> Self {
        normalize(raw, Combine::UnionOf)
    }

    pub fn delta_of(raw: &[(ExtRational, ExtRational)]) -> Self {
        normalize(raw, Combine::DeltaOf)
    }

    pub fn components(&self) -> &[(ExtRational, ExtRational)] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Whether `x` lies in some `[a_i, b_i)`.
    pub fn member(&self, x: Rational) -> Bit {
        Bit::from_bool(self.contains_ext(ExtRational::Finite(x)))
    }

    /// Membership on the extended line, used by the sweep: −∞ "belongs" when
    /// the first component is unbounded below.
    fn contains_ext(&self, x: ExtRational) -> bool {
        let i = self.components.partition_point(|&(a, _)| a <= x);
        i > 0 && x < self.components[i - 1].1
    }

    /// 1 iff the union reaches +∞.
    pub fn sup_is_infinite(&self) -> Bit {
        Bit::from_bool(matches!(self.components.last(), Some(&(_, ExtRational::PosInf))))
    }

    /// Every component has finite endpoints.
    pub fn is_bounded(&self) -> bool {
        self.components.iter().all(|(a, b)| a.is_finite() && b.is_finite())
    }

    /// All component endpoints in increasing order.
    pub fn endpoints(&self) -> Vec<ExtRational> {
        self.components.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// Lowest point, or −∞.
    pub fn inf(&self) -> Option<ExtRational> {
        self.components.first().map(|c| c.0)
    }

    /// Supremum of the union.
    pub fn sup(&self) -> Option<ExtRational> {
        self.components.last().map(|c| c.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalOp {
    Delta,
    Cap,
    Cup,
    Minus,
}

impl IntervalOp {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            IntervalOp::Delta => a ^ b,
            IntervalOp::Cap => a && b,
            IntervalOp::Cup => a || b,
            IntervalOp::Minus => a && !b,
        }
    }

    pub fn from_law(law: Law) -> Option<IntervalOp> {
        match law {
            Law::Xor => Some(IntervalOp::Delta),
            Law::And => Some(IntervalOp::Cap),
            Law::Or => Some(IntervalOp::Cup),
            _ => None,
        }
    }
}

impl std::str::FromStr for IntervalOp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "delta" => Ok(IntervalOp::Delta),
            "cap" => Ok(IntervalOp::Cap),
            "cup" => Ok(IntervalOp::Cup),
            "minus" => Ok(IntervalOp::Minus),
            other => Err(format!("unknown interval op `{other}` (expected delta, cap, cup)")),
        }
    }
}

/// One boundary sweep over the merged endpoint list. Between consecutive
/// breakpoints both operands are constant, so their membership at the left
/// breakpoint decides the whole piece.
pub fn iv_op(op: IntervalOp, a: &IntervalUnion, b: &IntervalUnion) -> IntervalUnion {
    let mut breaks = Vec::with_capacity(2 + 2 * (a.components.len() + b.components.len()));
    breaks.push(ExtRational::NegInf);
    breaks.extend(a.endpoints());
    breaks.extend(b.endpoints());
    breaks.sort();
    breaks.dedup();
    let (mut ia, mut ib) = (0usize, 0usize);
    let inside = |set: &IntervalUnion, i: &mut usize, x: ExtRational| {
        let comps = &set.components;
        while *i < comps.len() && comps[*i].1 <= x {
            *i += 1;
        }
        *i < comps.len() && comps[*i].0 <= x
    };
    let mut out: Vec<(ExtRational, ExtRational)> = Vec::new();
    for w in 0..breaks.len() {
        let x = breaks[w];
        if x == ExtRational::PosInf {
            break;
        }
        let next = breaks.get(w + 1).copied().unwrap_or(ExtRational::PosInf);
        if op.apply(inside(a, &mut ia, x), inside(b, &mut ib, x)) {
            match out.last_mut() {
                Some(last) if last.1 == x => last.1 = next,
                _ => out.push((x, next)),
            }
        }
    }
    IntervalUnion { components: out }
}

impl SetLike for IntervalUnion {
    fn empty_like(&self) -> Self {
        IntervalUnion::empty()
    }
    fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
    fn union(&self, other: &Self) -> Self {
        iv_op(IntervalOp::Cup, self, other)
    }
    fn intersection(&self, other: &Self) -> Self {
        iv_op(IntervalOp::Cap, self, other)
    }
    fn difference(&self, other: &Self) -> Self {
        iv_op(IntervalOp::Minus, self, other)
    }
    fn sym_diff(&self, other: &Self) -> Self {
        iv_op(IntervalOp::Delta, self, other)
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("{}");
        }
        for (i, (a, b)) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "[{a},{b})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn e(n: i128) -> ExtRational {
        ExtRational::from(n)
    }

    fn iu(pairs: &[(ExtRational, ExtRational)]) -> IntervalUnion {
        IntervalUnion::union_of(pairs)
    }

    /// Grid membership oracle: a point lies in the raw union (resp. Δ) iff
    /// one (resp. an odd number) of the raw symmetric intervals holds it.
    fn raw_member(raw: &[(ExtRational, ExtRational)], mode: Combine, x: Rational) -> bool {
        let x = ExtRational::Finite(x);
        let hits = raw
            .iter()
            .filter(|&&(a, b)| {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                lo <= x && x < hi
            })
            .count();
        match mode {
            Combine::UnionOf => hits > 0,
            Combine::DeltaOf => hits % 2 == 1,
        }
    }

    fn grid() -> impl Iterator<Item = Rational> {
        (-24..=24).map(|k| q(k, 4))
    }

    #[test]
    fn normalize_examples() {
        let u = IntervalUnion::union_of(&[(e(0), e(1)), (e(1), e(2))]);
        assert_eq!(u.components(), &[(e(0), e(2))]);
        let d = IntervalUnion::delta_of(&[(e(0), e(2)), (e(1), e(3))]);
        assert_eq!(d.components(), &[(e(0), e(1)), (e(2), e(3))]);
        assert!(IntervalUnion::union_of(&[(e(5), e(5))]).is_empty());
        for (raw, mode) in [
            (vec![(e(0), e(1)), (e(1), e(2))], Combine::UnionOf),
            (vec![(e(0), e(2)), (e(1), e(3))], Combine::DeltaOf),
        ] {
            let n = normalize(&raw, mode);
            for x in grid() {
                assert_eq!(n.member(x).is_one(), raw_member(&raw, mode, x));
            }
        }
    }

    #[test]
    fn reversed_endpoints_denote_the_same_interval() {
        assert_eq!(IntervalUnion::interval(3, 1), IntervalUnion::interval(1, 3));
        assert_eq!(
            IntervalUnion::interval(ExtRational::PosInf, 0),
            iu(&[(e(0), ExtRational::PosInf)])
        );
    }

    #[test]
    fn op_examples() {
        let neg = ExtRational::NegInf;
        let d = iv_op(IntervalOp::Delta, &iu(&[(neg, e(0))]), &iu(&[(neg, e(1))]));
        assert_eq!(d.components(), &[(e(0), e(1))]);
        let c = iv_op(IntervalOp::Cap, &iu(&[(e(0), e(3))]), &iu(&[(e(1), e(2))]));
        assert_eq!(c.components(), &[(e(1), e(2))]);
        let a = iu(&[(e(-2), e(0)), (e(1), ExtRational::PosInf)]);
        assert_eq!(iv_op(IntervalOp::Cup, &IntervalUnion::empty(), &a), a);
        // adjacent pieces from the two operands merge
        let m = iv_op(IntervalOp::Cup, &iu(&[(e(0), e(1))]), &iu(&[(e(1), e(2))]));
        assert_eq!(m.components(), &[(e(0), e(2))]);
    }

    #[test]
    fn member_examples() {
        let a = iu(&[(e(0), e(1))]);
        assert_eq!(a.member(qi(0)), Bit::ONE);
        assert_eq!(a.member(qi(1)), Bit::ZERO);
        let b = iu(&[(ExtRational::NegInf, e(0)), (e(2), ExtRational::PosInf)]);
        assert_eq!(b.member(qi(3)), Bit::ONE);
        assert_eq!(b.member(qi(1)), Bit::ZERO);
    }

    #[test]
    fn sup_examples() {
        assert_eq!(iu(&[(e(0), ExtRational::PosInf)]).sup_is_infinite(), Bit::ONE);
        assert_eq!(iu(&[(e(0), e(5))]).sup_is_infinite(), Bit::ZERO);
        assert_eq!(IntervalUnion::empty().sup_is_infinite(), Bit::ZERO);
    }

    #[test]
    fn display_round() {
        let a = iu(&[(ExtRational::NegInf, ExtRational::from(q(-1, 2))), (e(3), ExtRational::PosInf)]);
        assert_eq!(a.to_string(), "[-inf,-1/2) [3,inf)");
        assert_eq!(IntervalUnion::empty().to_string(), "{}");
    }

    fn ext_endpoint() -> impl Strategy<Value = ExtRational> {
        prop_oneof![
            1 => Just(ExtRational::NegInf),
            1 => Just(ExtRational::PosInf),
            12 => (-12i128..=12, 1i128..=4).prop_map(|(n, d)| ExtRational::from(q(n, d))),
        ]
    }

    fn raw_list() -> impl Strategy<Value = Vec<(ExtRational, ExtRational)>> {
        prop::collection::vec((ext_endpoint(), ext_endpoint()), 0..7)
    }

    fn union_strategy() -> impl Strategy<Value = IntervalUnion> {
        raw_list().prop_map(|r| IntervalUnion::delta_of(&r))
    }

    fn probes(sets: &[&IntervalUnion]) -> Vec<Rational> {
        let eps = q(1, 97);
        let mut xs: Vec<Rational> = grid().collect();
        for s in sets {
            for x in s.endpoints().into_iter().filter_map(ExtRational::finite) {
                xs.extend([x - eps, x, x + eps]);
            }
        }
        xs
    }

    fn canonical(u: &IntervalUnion) -> bool {
        u.components.iter().all(|(a, b)| a < b)
            && u.components.windows(2).all(|w| w[0].1 < w[1].0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn normalize_is_canonical_idempotent_and_order_free(
            raw in raw_list(),
            perm in any::<prop::sample::Index>(),
            union in any::<bool>(),
        ) {
            let mode = if union { Combine::UnionOf } else { Combine::DeltaOf };
            let n = normalize(&raw, mode);
            prop_assert!(canonical(&n));
            prop_assert_eq!(normalize(n.components(), Combine::UnionOf), n.clone());
            prop_assert_eq!(normalize(n.components(), Combine::DeltaOf), n.clone());
            let mut rotated = raw.clone();
            if !rotated.is_empty() {
                let k = perm.index(rotated.len());
                rotated.rotate_left(k);
                rotated.reverse();
            }
            prop_assert_eq!(normalize(&rotated, mode), n.clone());
            for x in probes(&[&n]) {
                prop_assert_eq!(n.member(x).is_one(), raw_member(&raw, mode, x));
            }
        }

        #[test]
        fn ring_laws(a in union_strategy(), b in union_strategy(), c in union_strategy()) {
            let d = |x: &IntervalUnion, y: &IntervalUnion| iv_op(IntervalOp::Delta, x, y);
            let m = |x: &IntervalUnion, y: &IntervalUnion| iv_op(IntervalOp::Cap, x, y);
            prop_assert_eq!(d(&d(&a, &b), &c), d(&a, &d(&b, &c)));
            prop_assert_eq!(d(&a, &b), d(&b, &a));
            prop_assert_eq!(d(&a, &IntervalUnion::empty()), a.clone());
            prop_assert_eq!(m(&a, &d(&b, &c)), d(&m(&a, &b), &m(&a, &c)));
            let lhs = m(&a, &d(&b, &c));
            let rhs = d(&m(&a, &b), &m(&a, &c));
            for x in probes(&[&a, &b, &c]) {
                prop_assert_eq!(lhs.member(x), rhs.member(x));
            }
        }

        #[test]
        fn delta_is_pointwise_xor(a in union_strategy(), b in union_strategy()) {
            for op in [IntervalOp::Delta, IntervalOp::Cap, IntervalOp::Cup, IntervalOp::Minus] {
                let r = iv_op(op, &a, &b);
                prop_assert!(canonical(&r));
                for x in probes(&[&a, &b]) {
                    prop_assert_eq!(r.member(x).is_one(), op.apply(a.member(x).is_one(), b.member(x).is_one()));
                }
            }
        }

        #[test]
        fn sup_predicate_is_additive_on_disjoint_pairs(a in union_strategy(), b in union_strategy()) {
            let b = b.difference(&a);
            prop_assert_eq!(a.union(&b).sup_is_infinite(), a.sup_is_infinite() ^ b.sup_is_infinite());
        }
    }
}
