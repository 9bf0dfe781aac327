//! The left Lebesgue–Stieltjes binary measure μ_f on symmetric-interval
//! unions, and the disjoint families used to exercise its countable
//! additivity.

use crate::b2::Bit;
use crate::interval::IntervalUnion;
use crate::rational::{ExtRational, Rational, floor_int, qi};
use crate::set_function::{
    CountableReport, DisjointFamily, DomainError, Measure, SetFunctionError, TailCertificate, TailReason,
    check_countable_family,
};
use crate::step::BinaryStepFunction;

/// μ_f([[a, b))) = f(a) ⊕ f(b), extended to unions by XOR over components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LSMeasure {
    f: BinaryStepFunction,
}

impl LSMeasure {
    pub fn new(f: BinaryStepFunction) -> Self {
        LSMeasure { f }
    }

    pub fn integrator(&self) -> &BinaryStepFunction {
        &self.f
    }

    pub fn eval(&self, a: &IntervalUnion) -> Bit {
        self.endpoint_xor(a.components())
    }

    /// The endpoint formula on an arbitrary list of symmetric intervals.
    /// Equals μ_f of their iterated symmetric difference.
    pub fn endpoint_xor(&self, raw: &[(ExtRational, ExtRational)]) -> Bit {
        raw.iter().map(|&(a, b)| self.f.eval(a) ^ self.f.eval(b)).collect()
    }

    /// g(t) = μ_f([[a, t))) = f(a) ⊕ f(t): the same toggles as f with the
    /// initial value shifted by f(a).
    pub fn cdf(&self, origin: ExtRational) -> BinaryStepFunction {
        let shift = self.f.eval(origin);
        BinaryStepFunction::normalize(self.f.v0() ^ shift, self.f.toggles().iter().copied())
    }
}

impl Measure<IntervalUnion> for LSMeasure {
    fn eval(&self, set: &IntervalUnion) -> Result<Bit, DomainError> {
        Ok(LSMeasure::eval(self, set))
    }
    fn describe(&self) -> String {
        format!("LS({})", self.f)
    }
}

/// One chain of the countable-additivity suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Chain {
    /// [[t_n, t_{n+1})) with t_n = b − (b − t0)/(n + 1) ↑ b, union [[t0, b)).
    ToFinite { t0: Rational, b: Rational },
    /// [[t0 + n h, t0 + (n+1) h)), union [[t0, ∞)).
    ToInfinity { t0: Rational, step: Rational },
    /// [[b − (n+1) h, b − n h)), union [[−∞, b)).
    FromNegInfinity { b: Rational, step: Rational },
}

impl Chain {
    pub fn member(&self, n: usize) -> IntervalUnion {
        let k = n as i128;
        match *self {
            Chain::ToFinite { t0, b } => {
                let t = |k: i128| b - (b - t0) / qi(k + 1);
                IntervalUnion::interval(t(k), t(k + 1))
            }
            Chain::ToInfinity { t0, step } => IntervalUnion::interval(t0 + step * qi(k), t0 + step * qi(k + 1)),
            Chain::FromNegInfinity { b, step } => {
                IntervalUnion::interval(b - step * qi(k + 1), b - step * qi(k))
            }
        }
    }

    pub fn union(&self) -> IntervalUnion {
        match *self {
            Chain::ToFinite { t0, b } => IntervalUnion::interval(t0, b),
            Chain::ToInfinity { t0, .. } => IntervalUnion::interval(t0, ExtRational::PosInf),
            Chain::FromNegInfinity { b, .. } => IntervalUnion::interval(ExtRational::NegInf, b),
        }
    }

    /// Index N with μ_f(A_n) = 0 for every n ≥ N: beyond N no toggle of f
    /// falls in any A_n.
    pub fn certificate(&self, f: &BinaryStepFunction) -> usize {
        let ts = f.toggles();
        let n = match *self {
            Chain::ToFinite { t0, b } => match ts.iter().rfind(|s| **s >= t0 && **s < b) {
                // t_N > s_max once N + 1 > (b − t0)/(b − s_max)
                Some(&s) => floor_int((b - t0) / (b - s)) + 1,
                None => 0,
            },
            Chain::ToInfinity { t0, step } => match ts.iter().rfind(|s| **s >= t0) {
                Some(&s) => floor_int((s - t0) / step) + 1,
                None => 0,
            },
            Chain::FromNegInfinity { b, step } => match ts.iter().find(|s| **s < b) {
                Some(&s) => floor_int((b - s) / step) + 1,
                None => 0,
            },
        };
        n.max(0) as usize
    }
}

/// Interleaves pairwise disjoint chains: A_n = ∪_j C_j(n).
pub fn chain_family(f: &BinaryStepFunction, chains: Vec<Chain>) -> DisjointFamily<IntervalUnion> {
    let index = chains.iter().map(|c| c.certificate(f)).max().unwrap_or(0);
    let union = chains.iter().fold(IntervalUnion::empty(), |u, c| crate::carrier::SetLike::union(&u, &c.union()));
    let label = format!("{} chain(s)", chains.len());
    DisjointFamily::new(
        label,
        move |n| {
            chains
                .iter()
                .fold(IntervalUnion::empty(), |u, c| crate::carrier::SetLike::union(&u, &c.member(n)))
        },
        union,
        TailCertificate { index, reason: TailReason::MeasureZeroAfter },
    )
}

/// Runs the countable check on a chain family, deepening to one past the
/// certificate when `depth` is shallower.
pub fn ls_structured_countable_check(
    m: &LSMeasure,
    family: &DisjointFamily<IntervalUnion>,
    depth: usize,
) -> Result<CountableReport, SetFunctionError> {
    check_countable_family(m, family, depth.max(family.tail.index + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::SetLike;
    use crate::interval::Combine;
    use crate::rational::q;
    use proptest::prelude::*;

    fn ind01() -> BinaryStepFunction {
        BinaryStepFunction::indicator(qi(0), qi(1))
    }

    #[test]
    fn eval_examples() {
        let m = LSMeasure::new(ind01());
        assert_eq!(m.eval(&IntervalUnion::interval(q(1, 2), qi(2))), Bit::ONE);
        assert_eq!(m.eval(&IntervalUnion::interval(q(1, 2), ExtRational::PosInf)), Bit::ONE);
        assert_eq!(m.eval(&IntervalUnion::empty()), Bit::ZERO);
        // (−∞, 1/2) picks up f(−∞) = v0
        assert_eq!(m.eval(&IntervalUnion::interval(ExtRational::NegInf, q(1, 2))), Bit::ONE);
    }

    #[test]
    fn cdf_examples() {
        let m = LSMeasure::new(ind01());
        assert_eq!(m.cdf(ExtRational::NegInf), ind01());
        // f(2) = 0, so t ↦ f(2) ⊕ f(t) is f itself on both sides of 2
        assert_eq!(m.cdf(ExtRational::from(2)), ind01());
        // f(1/2) = 1 flips every value
        assert_eq!(m.cdf(ExtRational::from(q(1, 2))), ind01().complement());
        let zero = LSMeasure::new(BinaryStepFunction::zero());
        assert_eq!(zero.cdf(ExtRational::from(7)), BinaryStepFunction::zero());
    }

    #[test]
    fn telescope_example() {
        let m = LSMeasure::new(ind01());
        let fam = chain_family(m.integrator(), vec![Chain::ToFinite { t0: qi(0), b: qi(1) }]);
        let r = ls_structured_countable_check(&m, &fam, 64).unwrap();
        assert!(r.passes());
        assert_eq!(r.union_value, Bit::ONE);
        // pieces [1 − 1/(n+1), 1 − 1/(n+2)) never hold the toggle at 1
        assert!(r.ones.is_empty() || r.xor_sum == Bit::ONE);

        let zero = LSMeasure::new(BinaryStepFunction::zero());
        let fam = chain_family(zero.integrator(), vec![Chain::ToInfinity { t0: qi(-3), step: q(1, 2) }]);
        let r = ls_structured_countable_check(&zero, &fam, 16).unwrap();
        assert!(r.passes() && r.ones.is_empty() && r.xor_sum == Bit::ZERO);
    }

    #[test]
    fn certificate_is_tight_enough() {
        let f = BinaryStepFunction::normalize(Bit::ONE, [q(-7, 2), qi(0), q(9, 10), qi(4)]);
        for chain in [
            Chain::ToFinite { t0: qi(-5), b: qi(1) },
            Chain::ToInfinity { t0: qi(-5), step: q(1, 3) },
            Chain::FromNegInfinity { b: qi(2), step: q(2, 3) },
        ] {
            let n = chain.certificate(&f);
            for k in n..n + 50 {
                let piece = chain.member(k);
                for s in f.toggles() {
                    assert_eq!(piece.member(*s), Bit::ZERO, "{chain:?} k={k} s={s}");
                }
            }
        }
    }

    fn step_strategy() -> impl Strategy<Value = BinaryStepFunction> {
        (any::<bool>(), prop::collection::vec((-20i128..=20, 1i128..=3), 0..8)).prop_map(|(v, ts)| {
            BinaryStepFunction::normalize(Bit::from_bool(v), ts.into_iter().map(|(n, d)| q(n, d)))
        })
    }

    fn endpoint() -> impl Strategy<Value = ExtRational> {
        prop_oneof![
            1 => Just(ExtRational::NegInf),
            1 => Just(ExtRational::PosInf),
            10 => (-30i128..=30, 1i128..=4).prop_map(|(n, d)| ExtRational::from(q(n, d))),
        ]
    }

    fn split(raw: &[(ExtRational, ExtRational)], cuts: &[(usize, u8)]) -> Vec<(ExtRational, ExtRational)> {
        let mut out = raw.to_vec();
        for &(i, w) in cuts {
            if out.is_empty() {
                break;
            }
            let i = i % out.len();
            let (a, b) = out[i];
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let c = match (lo, hi) {
                (ExtRational::Finite(x), ExtRational::Finite(y)) => x + (y - x) * q(w as i128 + 1, 257),
                (ExtRational::Finite(x), _) => x + qi(w as i128),
                (_, ExtRational::Finite(y)) => y - qi(w as i128),
                _ => qi(w as i128 - 128),
            };
            if ExtRational::Finite(c) > lo && ExtRational::Finite(c) < hi {
                out[i] = (lo, ExtRational::Finite(c));
                out.push((ExtRational::Finite(c), hi));
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn representation_independence(
            f in step_strategy(),
            raw in prop::collection::vec((endpoint(), endpoint()), 0..6),
            cuts in prop::collection::vec((any::<usize>(), any::<u8>()), 0..6),
        ) {
            let m = LSMeasure::new(f);
            let canonical = crate::interval::normalize(&raw, Combine::DeltaOf);
            let refined = split(&raw, &cuts);
            prop_assert_eq!(m.eval(&canonical), m.endpoint_xor(&raw));
            prop_assert_eq!(m.eval(&canonical), m.endpoint_xor(&refined));
        }

        #[test]
        fn finite_additivity(
            f in step_strategy(),
            a in prop::collection::vec((endpoint(), endpoint()), 0..5),
            b in prop::collection::vec((endpoint(), endpoint()), 0..5),
        ) {
            let m = LSMeasure::new(f);
            let a = IntervalUnion::union_of(&a);
            let b = IntervalUnion::union_of(&b).difference(&a);
            prop_assert_eq!(m.eval(&a.union(&b)), m.eval(&a) ^ m.eval(&b));
        }

        #[test]
        fn cdf_round_trip(f in step_strategy(), a in endpoint(), c in endpoint(), d in endpoint()) {
            let m = LSMeasure::new(f);
            let g = m.cdf(a);
            let cd = IntervalUnion::interval(c, d);
            prop_assert_eq!(g.eval(c) ^ g.eval(d), m.eval(&cd));
            prop_assert_eq!(LSMeasure::new(g.clone()).eval(&cd), m.eval(&cd));
            prop_assert_eq!(g.eval(a), Bit::ZERO);
        }

        #[test]
        fn chain_identity(f in step_strategy(), mut pts in prop::collection::btree_set(-40i128..40, 2..10)) {
            let v: Vec<Rational> = std::mem::take(&mut pts).into_iter().map(|n| q(n, 2)).collect();
            let raw: Vec<(ExtRational, ExtRational)> =
                v.chunks_exact(2).map(|c| (ExtRational::from(c[0]), ExtRational::from(c[1]))).collect();
            let m = LSMeasure::new(f.clone());
            let direct: Bit = v[..raw.len() * 2].iter().map(|x| f.at(*x)).collect();
            prop_assert_eq!(m.eval(&IntervalUnion::delta_of(&raw)), direct);
        }

        #[test]
        fn chain_families_pass(
            f in step_strategy(),
            t0 in -40i128..0, len in 1i128..40, den in 1i128..5, step in 1i128..5,
        ) {
            let m = LSMeasure::new(f.clone());
            let b = q(t0 + len, den);
            let chains = vec![
                Chain::FromNegInfinity { b: q(t0, den) - qi(1), step: q(step, 3) },
                Chain::ToFinite { t0: q(t0, den), b },
                Chain::ToInfinity { t0: b, step: q(step, 2) },
            ];
            let fam = chain_family(&f, chains);
            let r = ls_structured_countable_check(&m, &fam, 8).unwrap();
            prop_assert!(r.passes(), "{:?}", r);
        }
    }
}
