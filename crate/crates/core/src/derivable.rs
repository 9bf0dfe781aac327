//! Bounded box unions in Rⁿ, locally finite point sets, the parity measure
//! μ_H(A) = π(|A ∩ H|), derivatives and their inverse.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::b2::Bit;
use crate::carrier::{FiniteSet, SetLike};
use crate::interval::IntervalOp;
use crate::rational::{ExtRational, Rational, ceil_int, floor_int, q, qi, sqrt_lower_bound};
use crate::step::{Point, SparsePointFunction};

/// Largest supported dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 3;

/// Point enumeration refuses windows holding more lattice points than this.
pub const ENUMERATION_LIMIT: u128 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivableError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {dim} outside 1..={cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("the diameter of the empty set is undefined")]
    EmptyDiameter,
    #[error("lattice scale must be positive, got {0}")]
    BadScale(String),
    #[error("not derivable at {x}: mu({a}) = {va} but mu({b}) = {vb}")]
    NotDerivable { x: String, a: String, va: Bit, b: String, vb: Bit },
    #[error("{0}")]
    NotStructural(String),
    #[error("window holds {0} lattice points, above the enumeration limit")]
    TooManyPoints(u128),
}

/// A half-open box ∏ [lo_i, hi_i) with lo_i < hi_i.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxisBox {
    lo: Vec<Rational>,
    hi: Vec<Rational>,
}

impl AxisBox {
    /// Per axis the sides are reordered; a degenerate side yields `None`.
    pub fn new(sides: &[(Rational, Rational)]) -> Option<AxisBox> {
        let mut lo = Vec::with_capacity(sides.len());
        let mut hi = Vec::with_capacity(sides.len());
        for &(a, b) in sides {
            if a == b {
                return None;
            }
            lo.push(a.min(b));
            hi.push(a.max(b));
        }
        Some(AxisBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Rational] {
        &self.lo
    }

    pub fn hi(&self) -> &[Rational] {
        &self.hi
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.iter().zip(&self.lo).zip(&self.hi).all(|((v, a), b)| a <= v && v < b)
    }

    fn corners(&self) -> Vec<Vec<Rational>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { self.hi[i] } else { self.lo[i] }).collect())
            .collect()
    }
}

impl fmt::Display for AxisBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "[{},{})", ExtRational::Finite(self.lo[i]), ExtRational::Finite(self.hi[i]))?;
        }
        Ok(())
    }
}

/// A finite union of bounded half-open boxes in Rⁿ, stored canonically:
/// the filled cells of the coarsest grid describing the set, merged along
/// the first axis and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxUnion {
    dim: usize,
    boxes: Vec<AxisBox>,
}

struct Grid {
    cuts: Vec<Vec<Rational>>,
    mask: Vec<bool>,
}

impl Grid {
    fn shape(&self) -> Vec<usize> {
        self.cuts.iter().map(|c| c.len().saturating_sub(1)).collect()
    }

    fn cells(shape: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
        let total: usize = shape.iter().product();
        (0..total).map(move |mut flat| {
            let mut idx = vec![0; shape.len()];
            for a in (0..shape.len()).rev() {
                idx[a] = flat % shape[a];
                flat /= shape[a];
            }
            idx
        })
    }

    fn flat(idx: &[usize], shape: &[usize]) -> usize {
        idx.iter().zip(shape).fold(0, |acc, (i, s)| acc * s + i)
    }

    /// Drops empty end slabs and merges equal neighbouring slabs on `axis`.
    fn coarsen(&mut self, axis: usize) {
        let shape = self.shape();
        let n = shape[axis];
        let slab = |j: usize| -> Vec<bool> {
            Grid::cells(&shape).filter(|idx| idx[axis] == j).map(|idx| self.mask[Grid::flat(&idx, &shape)]).collect()
        };
        let slabs: Vec<Vec<bool>> = (0..n).map(slab).collect();
        let filled: Vec<usize> = (0..n).filter(|&j| slabs[j].iter().any(|b| *b)).collect();
        let (Some(&s), Some(&e)) = (filled.first(), filled.last()) else {
            self.cuts = vec![Vec::new(); shape.len()];
            self.mask.clear();
            return;
        };
        let old = &self.cuts[axis];
        let mut cuts = vec![old[s]];
        let mut reps = vec![s];
        for j in s + 1..=e {
            if slabs[j] != slabs[j - 1] {
                cuts.push(old[j]);
                reps.push(j);
            }
        }
        cuts.push(old[e + 1]);
        let mut new_cuts = self.cuts.clone();
        new_cuts[axis] = cuts;
        let new_grid_shape: Vec<usize> = new_cuts.iter().map(|c| c.len() - 1).collect();
        let mask = Grid::cells(&new_grid_shape)
            .map(|mut idx| {
                idx[axis] = reps[idx[axis]];
                self.mask[Grid::flat(&idx, &shape)]
            })
            .collect();
        self.cuts = new_cuts;
        self.mask = mask;
    }

    fn into_union(mut self, dim: usize) -> BoxUnion {
        if self.mask.iter().all(|b| !b) {
            return BoxUnion::empty(dim);
        }
        for axis in 0..dim {
            self.coarsen(axis);
        }
        let shape = self.shape();
        let mut boxes = Vec::new();
        for idx in Grid::cells(&shape) {
            if !self.mask[Grid::flat(&idx, &shape)] {
                continue;
            }
            // start of a run along axis 0
            if idx[0] > 0 {
                let mut prev = idx.clone();
                prev[0] -= 1;
                if self.mask[Grid::flat(&prev, &shape)] {
                    continue;
                }
            }
            let mut end = idx[0];
            loop {
                let mut next = idx.clone();
                next[0] = end + 1;
                if next[0] < shape[0] && self.mask[Grid::flat(&next, &shape)] {
                    end += 1;
                } else {
                    break;
                }
            }
            let lo: Vec<Rational> = (0..dim).map(|a| self.cuts[a][idx[a]]).collect();
            let hi: Vec<Rational> =
                (0..dim).map(|a| if a == 0 { self.cuts[0][end + 1] } else { self.cuts[a][idx[a] + 1] }).collect();
            boxes.push(AxisBox { lo, hi });
        }
        boxes.sort();
        BoxUnion { dim, boxes }
    }
}

impl BoxUnion {
    pub fn empty(dim: usize) -> Self {
        BoxUnion { dim, boxes: Vec::new() }
    }

    /// Canonical union of raw, possibly overlapping boxes.
    pub fn new(dim: usize, boxes: Vec<AxisBox>) -> Result<BoxUnion, DerivableError> {
        for b in &boxes {
            if b.dim() != dim {
                return Err(DerivableError::DimensionMismatch(dim, b.dim()));
            }
        }
        let raw = BoxUnion { dim, boxes };
        Ok(grid_combine(dim, &[&raw], |m| m[0]))
    }

    /// A single box from per-axis sides.
    pub fn cuboid(sides: &[(Rational, Rational)]) -> BoxUnion {
        match AxisBox::new(sides) {
            Some(b) => BoxUnion { dim: sides.len(), boxes: vec![b] },
            None => BoxUnion::empty(sides.len()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// The empty set carries no intrinsic dimension in literals; this fixes it.
    pub fn with_dim(self, dim: usize) -> BoxUnion {
        if self.boxes.is_empty() { BoxUnion::empty(dim) } else { self }
    }
}

fn grid_combine(dim: usize, sets: &[&BoxUnion], op: impl Fn(&[bool]) -> bool) -> BoxUnion {
    let mut cuts: Vec<Vec<Rational>> = vec![Vec::new(); dim];
    for s in sets {
        for b in &s.boxes {
            for (a, c) in cuts.iter_mut().enumerate() {
                c.push(b.lo[a]);
                c.push(b.hi[a]);
            }
        }
    }
    for c in &mut cuts {
        c.sort();
        c.dedup();
    }
    if cuts.iter().any(|c| c.len() < 2) {
        return BoxUnion::empty(dim);
    }
    let shape: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
    let mask = Grid::cells(&shape)
        .map(|idx| {
            let corner: Vec<Rational> = (0..dim).map(|a| cuts[a][idx[a]]).collect();
            let bits: Vec<bool> = sets.iter().map(|s| bx_member(s, &corner)).collect();
            op(&bits)
        })
        .collect();
    Grid { cuts, mask }.into_union(dim)
}

pub fn bx_op(op: IntervalOp, a: &BoxUnion, b: &BoxUnion) -> Result<BoxUnion, DerivableError> {
    let dim = match (a.is_empty(), b.is_empty()) {
        (true, _) if a.dim != b.dim => b.dim,
        (_, true) if a.dim != b.dim => a.dim,
        _ if a.dim != b.dim => return Err(DerivableError::DimensionMismatch(a.dim, b.dim)),
        _ => a.dim,
    };
    let law: fn(bool, bool) -> bool = match op {
        IntervalOp::Delta => |x, y| x ^ y,
        IntervalOp::Cap => |x, y| x && y,
        IntervalOp::Cup => |x, y| x || y,
        IntervalOp::Minus => |x, y| x && !y,
    };
    Ok(grid_combine(dim, &[a, b], |m| law(m[0], m[1])))
}

pub fn bx_member(a: &BoxUnion, x: &[Rational]) -> bool {
    a.boxes.iter().any(|b| b.contains(x))
}

impl SetLike for BoxUnion {
    fn empty_like(&self) -> Self {
        BoxUnion::empty(self.dim)
    }
    fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }
    fn union(&self, other: &Self) -> Self {
        bx_op(IntervalOp::Cup, self, other).expect("box dimensions agree")
    }
    fn intersection(&self, other: &Self) -> Self {
        bx_op(IntervalOp::Cap, self, other).expect("box dimensions agree")
    }
    fn difference(&self, other: &Self) -> Self {
        bx_op(IntervalOp::Minus, self, other).expect("box dimensions agree")
    }
    fn sym_diff(&self, other: &Self) -> Self {
        bx_op(IntervalOp::Delta, self, other).expect("box dimensions agree")
    }
}

impl fmt::Display for BoxUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.boxes.is_empty() {
            return f.write_str("{}");
        }
        for (i, b) in self.boxes.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            b.fmt(f)?;
        }
        Ok(())
    }
}

fn dist_sq(x: &[Rational], y: &[Rational]) -> Rational {
    x.iter().zip(y).map(|(a, b)| (*a - *b) * (*a - *b)).sum()
}

/// Squared diameter: the largest squared distance between box corners,
/// which is where the supremum over points of A is approached.
pub fn diameter_sq(a: &BoxUnion) -> Result<Rational, DerivableError> {
    if a.is_empty() {
        return Err(DerivableError::EmptyDiameter);
    }
    let corners: BTreeSet<Vec<Rational>> = a.boxes.iter().flat_map(|b| b.corners()).collect();
    let corners: Vec<Vec<Rational>> = corners.into_iter().collect();
    let mut best = Rational::from_integer(0);
    for (i, x) in corners.iter().enumerate() {
        for y in &corners[i + 1..] {
            best = best.max(dist_sq(x, y));
        }
    }
    Ok(best)
}

/// A set meeting every bounded box in finitely many points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocallyFiniteSet {
    Finite { dim: usize, points: FiniteSet<Point> },
    /// offset + scale·Zⁿ
    Lattice { scale: Rational, offset: Vec<Rational> },
}

impl LocallyFiniteSet {
    pub fn finite(dim: usize, points: impl IntoIterator<Item = Point>) -> Result<Self, DerivableError> {
        let points = FiniteSet::new(points);
        for p in points.iter() {
            if p.dim() != dim {
                return Err(DerivableError::DimensionMismatch(dim, p.dim()));
            }
        }
        Ok(LocallyFiniteSet::Finite { dim, points })
    }

    pub fn lattice(scale: Rational, offset: Vec<Rational>) -> Result<Self, DerivableError> {
        if scale <= qi(0) {
            return Err(DerivableError::BadScale(ExtRational::Finite(scale).to_string()));
        }
        Ok(LocallyFiniteSet::Lattice { scale, offset })
    }

    pub fn dim(&self) -> usize {
        match self {
            LocallyFiniteSet::Finite { dim, .. } => *dim,
            LocallyFiniteSet::Lattice { offset, .. } => offset.len(),
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        match self {
            LocallyFiniteSet::Finite { points, .. } => points.contains(x),
            LocallyFiniteSet::Lattice { scale, offset } => {
                x.dim() == offset.len() && x.0.iter().zip(offset).all(|(v, o)| ((*v - *o) / *scale).is_integer())
            }
        }
    }

    /// Lattice indices k with a ≤ o + k·q < b, per axis.
    fn index_range(scale: Rational, o: Rational, a: Rational, b: Rational) -> (i128, i128) {
        (ceil_int((a - o) / scale), ceil_int((b - o) / scale))
    }

    fn check_dim(&self, a: &BoxUnion) -> Result<(), DerivableError> {
        if a.is_empty() || a.dim() == self.dim() {
            Ok(())
        } else {
            Err(DerivableError::DimensionMismatch(self.dim(), a.dim()))
        }
    }

    /// |A ∩ H|, exact.
    pub fn count(&self, a: &BoxUnion) -> Result<u128, DerivableError> {
        self.check_dim(a)?;
        Ok(match self {
            LocallyFiniteSet::Finite { points, .. } => points.iter().filter(|p| bx_member(a, &p.0)).count() as u128,
            LocallyFiniteSet::Lattice { scale, offset } => a
                .boxes()
                .iter()
                .map(|b| {
                    (0..offset.len())
                        .map(|i| {
                            let (lo, hi) = Self::index_range(*scale, offset[i], b.lo[i], b.hi[i]);
                            (hi - lo).max(0) as u128
                        })
                        .product::<u128>()
                })
                .sum(),
        })
    }

    /// A ∩ H as an explicit set.
    pub fn points_in(&self, a: &BoxUnion) -> Result<FiniteSet<Point>, DerivableError> {
        self.check_dim(a)?;
        match self {
            LocallyFiniteSet::Finite { points, .. } => Ok(points.filter(|p| bx_member(a, &p.0))),
            LocallyFiniteSet::Lattice { scale, offset } => {
                let n = self.count(a)?;
                if n > ENUMERATION_LIMIT {
                    return Err(DerivableError::TooManyPoints(n));
                }
                let mut out = BTreeSet::new();
                for b in a.boxes() {
                    let ranges: Vec<(i128, i128)> = (0..offset.len())
                        .map(|i| Self::index_range(*scale, offset[i], b.lo[i], b.hi[i]))
                        .collect();
                    let mut acc: Vec<Vec<Rational>> = vec![Vec::new()];
                    for (i, &(lo, hi)) in ranges.iter().enumerate() {
                        acc = acc
                            .into_iter()
                            .flat_map(|prefix| {
                                (lo..hi).map(move |k| {
                                    let mut p = prefix.clone();
                                    p.push(offset[i] + *scale * qi(k));
                                    p
                                })
                            })
                            .collect();
                    }
                    out.extend(acc.into_iter().map(Point));
                }
                Ok(FiniteSet(out))
            }
        }
    }

    /// min |x − h|² over h ∈ H ∖ {x}; `None` when H ∖ {x} is empty.
    pub fn nearest_other_sq(&self, x: &Point) -> Option<Rational> {
        match self {
            LocallyFiniteSet::Finite { points, .. } => {
                points.iter().filter(|p| *p != x).map(|p| dist_sq(&p.0, &x.0)).min()
            }
            LocallyFiniteSet::Lattice { scale, offset } => {
                if self.contains(x) {
                    return Some(*scale * *scale);
                }
                // the componentwise nearest lattice point differs from x
                Some(
                    x.0.iter()
                        .zip(offset)
                        .map(|(v, o)| {
                            let t = (*v - *o) / *scale;
                            let below = t - Rational::from_integer(floor_int(t));
                            let d = below.min(qi(1) - below) * *scale;
                            d * d
                        })
                        .sum(),
                )
            }
        }
    }
}

impl fmt::Display for LocallyFiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocallyFiniteSet::Finite { points, .. } => {
                f.write_str("points=")?;
                for (i, p) in points.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            LocallyFiniteSet::Lattice { scale, offset } => {
                write!(f, "lattice scale={} offset=(", ExtRational::Finite(*scale))?;
                for (i, o) in offset.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", ExtRational::Finite(*o))?;
                }
                f.write_str(")")
            }
        }
    }
}

type BoxEval = Arc<dyn Fn(&BoxUnion) -> Bit + Send + Sync>;

/// A measure on box unions together with what is known of its derivative.
#[derive(Clone)]
pub enum DerivableMeasure {
    /// μ_H(A) = π(|A ∩ H|), derivative 1_H.
    Parity(LocallyFiniteSet),
    /// An arbitrary evaluation whose derivative is found by probing boxes
    /// of squared diameter below `tolerance_sq`.
    Declared { label: String, dim: usize, eval: BoxEval, tolerance_sq: Rational },
}

impl fmt::Debug for DerivableMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivableMeasure::Parity(h) => write!(f, "Parity({h})"),
            DerivableMeasure::Declared { label, .. } => write!(f, "Declared({label})"),
        }
    }
}

pub fn mu_locfin(h: LocallyFiniteSet) -> DerivableMeasure {
    DerivableMeasure::Parity(h)
}

impl DerivableMeasure {
    pub fn dim(&self) -> usize {
        match self {
            DerivableMeasure::Parity(h) => h.dim(),
            DerivableMeasure::Declared { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, a: &BoxUnion) -> Result<Bit, DerivableError> {
        match self {
            DerivableMeasure::Parity(h) => Ok(Bit::from_bool(h.count(a)? % 2 == 1)),
            DerivableMeasure::Declared { dim, eval, .. } => {
                if !a.is_empty() && a.dim() != *dim {
                    return Err(DerivableError::DimensionMismatch(*dim, a.dim()));
                }
                Ok(eval(a))
            }
        }
    }
}

/// dμ(x): membership for μ_H, otherwise the common value on probe boxes.
pub fn derivative_at(mu: &DerivableMeasure, x: &Point) -> Result<Bit, DerivableError> {
    match mu {
        DerivableMeasure::Parity(h) => {
            if x.dim() != h.dim() {
                return Err(DerivableError::DimensionMismatch(h.dim(), x.dim()));
            }
            Ok(Bit::from_bool(h.contains(x)))
        }
        DerivableMeasure::Declared { tolerance_sq, .. } => {
            let seed = x.0.iter().fold(0u64, |acc, c| acc.rotate_left(7) ^ (*c.numer() as u64) ^ (*c.denom() as u64));
            let report = derivability_probe(mu, x, *tolerance_sq, 64, seed)?;
            match report.witness {
                Some((a, va, b, vb)) => Err(DerivableError::NotDerivable {
                    x: x.to_string(),
                    a: a.to_string(),
                    va,
                    b: b.to_string(),
                    vb,
                }),
                None => Ok(report.values[0].1),
            }
        }
    }
}

/// Outcome of probing μ on small boxes around x.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub values: Vec<(BoxUnion, Bit)>,
    pub pass: bool,
    pub witness: Option<(BoxUnion, Bit, BoxUnion, Bit)>,
}

/// A random box containing x with squared diameter below `eps_sq`.
pub fn small_box_around<R: Rng + ?Sized>(rng: &mut R, x: &Point, eps_sq: Rational) -> BoxUnion {
    let n = x.dim().max(1) as i128;
    // side s with n·s² < ε²
    let s = sqrt_lower_bound(eps_sq / qi(n), 1 << 20) * q(63, 64);
    let s = if s > qi(0) { s } else { eps_sq.min(qi(1)) / qi(4 * n) };
    let sides: Vec<(Rational, Rational)> = x
        .0
        .iter()
        .map(|&c| {
            let total = rng.gen_range(1..=64);
            let left = rng.gen_range(0..total);
            let unit = s / qi(64);
            (c - unit * qi(left), c + unit * qi(total - left))
        })
        .collect();
    BoxUnion::cuboid(&sides)
}

pub fn derivability_probe(
    mu: &DerivableMeasure,
    x: &Point,
    eps_sq: Rational,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport, DerivableError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values: Vec<(BoxUnion, Bit)> = Vec::with_capacity(samples.max(1));
    for _ in 0..samples.max(1) {
        let b = small_box_around(&mut rng, x, eps_sq);
        let v = mu.eval(&b)?;
        values.push((b, v));
    }
    let first = values[0].clone();
    let witness = values.iter().find(|(_, v)| *v != first.1).map(|(b, v)| (first.0.clone(), first.1, b.clone(), *v));
    Ok(ProbeReport { pass: witness.is_none(), values, witness })
}

/// Half the distance from x to H ∖ {x}, squared; boxes around x below it
/// meet H at most in x.
pub fn analytic_epsilon_sq(h: &LocallyFiniteSet, x: &Point) -> Option<Rational> {
    h.nearest_other_sq(x).map(|d| d / qi(4))
}

/// {x ∈ A : dμ(x) = 1}.
pub fn derivative_support(mu: &DerivableMeasure, a: &BoxUnion) -> Result<FiniteSet<Point>, DerivableError> {
    match mu {
        DerivableMeasure::Parity(h) => h.points_in(a),
        DerivableMeasure::Declared { label, .. } => {
            Err(DerivableError::NotStructural(format!("{label}: support needs a declared point set")))
        }
    }
}

/// μ_g(A) = π(|A ∩ supp g|).
pub fn reconstruct_measure(g: &SparsePointFunction<Point>, dim: usize) -> Result<DerivableMeasure, DerivableError> {
    Ok(DerivableMeasure::Parity(LocallyFiniteSet::finite(dim, g.support().iter().cloned())?))
}

/// ∫ f dμ = ⊕_x f(x)·dμ(x) over the finite support of f.
pub fn integral_derivable(f: &SparsePointFunction<Point>, mu: &DerivableMeasure) -> Result<Bit, DerivableError> {
    f.support().iter().map(|x| derivative_at(mu, x)).collect()
}

/// ∫_A g dμ = μ(A ∩ supp g) = π(|A ∩ supp g ∩ supp dμ|).
pub fn integral_on_derivable(
    a: &BoxUnion,
    g: &SparsePointFunction<Point>,
    mu: &DerivableMeasure,
) -> Result<Bit, DerivableError> {
    g.support().iter().filter(|x| bx_member(a, &x.0)).map(|x| derivative_at(mu, x)).collect()
}

/// Random bounded box union with up to `max_boxes` boxes.
pub fn sample_box_union<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_boxes: usize, span: i128) -> BoxUnion {
    let k = rng.gen_range(0..=max_boxes);
    let boxes = (0..k)
        .filter_map(|_| {
            let sides: Vec<(Rational, Rational)> = (0..dim)
                .map(|_| (crate::sample::rational(rng, span, 3), crate::sample::rational(rng, span, 3)))
                .collect();
            AxisBox::new(&sides)
        })
        .collect();
    BoxUnion::new(dim, boxes).expect("sampled boxes share a dimension")
}

pub fn sample_point<R: Rng + ?Sized>(rng: &mut R, dim: usize, span: i128, max_den: i128) -> Point {
    Point((0..dim).map(|_| crate::sample::rational(rng, span, max_den)).collect())
}

pub fn sample_finite_locfin<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_len: usize, span: i128) -> LocallyFiniteSet {
    let k = rng.gen_range(0..=max_len);
    let pts: Vec<Point> = (0..k).map(|_| sample_point(rng, dim, span, 3)).collect();
    LocallyFiniteSet::finite(dim, pts).expect("sampled points share a dimension")
}

pub fn sample_lattice<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> LocallyFiniteSet {
    let scale = [q(1, 2), qi(1), q(2, 3), q(3, 2), qi(2)][rng.gen_range(0..5)];
    let offset = (0..dim).map(|_| crate::sample::rational(rng, 1, 4)).collect();
    LocallyFiniteSet::lattice(scale, offset).expect("positive scale")
}

/// A random finite partition of A: pieces A ∩ B_j ∖ (B_0 ∪ … ∪ B_{j−1})
/// plus the remainder.
pub fn sample_partition<R: Rng + ?Sized>(rng: &mut R, a: &BoxUnion, parts: usize, span: i128) -> Vec<BoxUnion> {
    let mut rest = a.clone();
    let mut out = Vec::new();
    for _ in 1..parts.max(1) {
        let b = sample_box_union(rng, a.dim(), 2, span);
        let piece = rest.intersection(&b);
        rest = rest.difference(&piece);
        out.push(piece);
    }
    out.push(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::b2::parity;

    fn bx(sides: &[(i128, i128)]) -> BoxUnion {
        BoxUnion::cuboid(&sides.iter().map(|&(a, b)| (qi(a), qi(b))).collect::<Vec<_>>())
    }

    fn pt(xs: &[i128]) -> Point {
        Point(xs.iter().map(|&x| qi(x)).collect())
    }

    fn unit_lattice(dim: usize) -> LocallyFiniteSet {
        LocallyFiniteSet::lattice(qi(1), vec![qi(0); dim]).unwrap()
    }

    /// Membership on a fine rational grid covering both operands.
    fn grid_points(sets: &[&BoxUnion]) -> Vec<Vec<Rational>> {
        let dim = sets[0].dim();
        let mut axes: Vec<Vec<Rational>> = vec![Vec::new(); dim];
        for s in sets {
            for b in s.boxes() {
                for (a, ax) in axes.iter_mut().enumerate() {
                    ax.push(b.lo()[a]);
                    ax.push(b.hi()[a]);
                }
            }
        }
        let mut pts = vec![Vec::new()];
        for mut ax in axes {
            ax.sort();
            ax.dedup();
            let mut probes = ax.clone();
            probes.extend(ax.windows(2).map(|w| (w[0] + w[1]) / qi(2)));
            if let (Some(f), Some(l)) = (ax.first(), ax.last()) {
                probes.push(*f - qi(1));
                probes.push(*l + qi(1));
            }
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    probes.iter().map(move |c| {
                        let mut p = p.clone();
                        p.push(*c);
                        p
                    })
                })
                .collect();
        }
        pts
    }

    #[test]
    fn op_examples() {
        let a = bx(&[(0, 2), (0, 2)]);
        let b = bx(&[(1, 3), (1, 3)]);
        assert_eq!(bx_op(IntervalOp::Cap, &a, &b).unwrap(), bx(&[(1, 2), (1, 2)]));
        // two unit squares sharing half
        let s = bx(&[(0, 2), (0, 2)]);
        let t = bx(&[(1, 3), (0, 2)]);
        let d = bx_op(IntervalOp::Delta, &s, &t).unwrap();
        assert_eq!(d.boxes().len(), 2);
        assert_eq!(d, bx(&[(0, 1), (0, 2)]).union(&bx(&[(2, 3), (0, 2)])));
        assert!(!bx_member(&bx(&[(0, 1), (0, 1)]), &[qi(1), qi(0)]));
        assert!(bx_member(&bx(&[(0, 1), (0, 1)]), &[qi(0), qi(0)]));
        assert!(bx_op(IntervalOp::Cup, &bx(&[(0, 1)]), &a).is_err());
    }

    #[test]
    fn ops_match_membership_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in 1..=3 {
            for _ in 0..60 {
                let a = sample_box_union(&mut rng, dim, 3, 3);
                let b = sample_box_union(&mut rng, dim, 3, 3);
                let probes = grid_points(&[&a, &b]);
                for (op, law) in [
                    (IntervalOp::Delta, (|x: bool, y: bool| x ^ y) as fn(bool, bool) -> bool),
                    (IntervalOp::Cap, |x, y| x && y),
                    (IntervalOp::Cup, |x, y| x || y),
                    (IntervalOp::Minus, |x, y| x && !y),
                ] {
                    let r = bx_op(op, &a, &b).unwrap();
                    for p in &probes {
                        assert_eq!(bx_member(&r, p), law(bx_member(&a, p), bx_member(&b, p)));
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_form_is_representation_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let a = sample_box_union(&mut rng, 2, 4, 3);
            let b = sample_box_union(&mut rng, 2, 4, 3);
            // (A ∖ B) ∪ (A ∩ B) rebuilds A from different pieces
            let rebuilt = a.difference(&b).union(&a.intersection(&b));
            assert_eq!(rebuilt, a);
            let split = BoxUnion::new(2, a.boxes().iter().cloned().chain(a.intersection(&b).boxes().iter().cloned()).collect())
                .unwrap();
            assert_eq!(split, a);
        }
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter_sq(&bx(&[(0, 1), (0, 1)])).unwrap(), qi(2));
        assert_eq!(diameter_sq(&bx(&[(0, 1)])).unwrap(), qi(1));
        let two = bx(&[(0, 1), (0, 1)]).union(&bx(&[(3, 4), (3, 4)]));
        assert_eq!(diameter_sq(&two).unwrap(), qi(32));
        assert_eq!(diameter_sq(&BoxUnion::empty(2)), Err(DerivableError::EmptyDiameter));
    }

    #[test]
    fn diameter_bounds_grid_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = sample_box_union(&mut rng, 2, 3, 3);
            if a.is_empty() {
                continue;
            }
            let d = diameter_sq(&a).unwrap();
            let pts: Vec<Vec<Rational>> = grid_points(&[&a]).into_iter().filter(|p| bx_member(&a, p)).collect();
            let mut seen = qi(0);
            for x in &pts {
                for y in &pts {
                    seen = seen.max(dist_sq(x, y));
                }
            }
            assert!(seen <= d);
        }
    }

    #[test]
    fn count_examples() {
        assert_eq!(unit_lattice(1).count(&BoxUnion::cuboid(&[(qi(0), q(5, 2))])).unwrap(), 3);
        let h = LocallyFiniteSet::finite(2, [pt(&[0, 0]), pt(&[1, 1])]).unwrap();
        assert_eq!(h.count(&bx(&[(0, 1), (0, 1)])).unwrap(), 1);
        assert_eq!(h.count(&BoxUnion::empty(2)).unwrap(), 0);
        let mu = mu_locfin(unit_lattice(1));
        assert_eq!(mu.eval(&BoxUnion::cuboid(&[(qi(0), q(5, 2))])).unwrap(), Bit::ONE);
        assert_eq!(mu_locfin(h.clone()).eval(&bx(&[(0, 2), (0, 2)])).unwrap(), Bit::ZERO);
        let null = mu_locfin(LocallyFiniteSet::finite(2, []).unwrap());
        assert_eq!(null.eval(&bx(&[(0, 9), (0, 9)])).unwrap(), Bit::ZERO);
    }

    #[test]
    fn lattice_count_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for dim in 1..=3 {
            for _ in 0..50 {
                let h = sample_lattice(&mut rng, dim);
                let a = sample_box_union(&mut rng, dim, 3, 3);
                let LocallyFiniteSet::Lattice { scale, offset } = &h else { unreachable!() };
                // brute force: scan a generous index cube
                let mut brute = 0u128;
                let r = 4 / scale.to_integer().max(1) + 10;
                let mut idx = vec![-r; dim];
                loop {
                    let p: Vec<Rational> = (0..dim).map(|i| offset[i] + *scale * qi(idx[i])).collect();
                    if bx_member(&a, &p) {
                        brute += 1;
                    }
                    let mut i = 0;
                    while i < dim && idx[i] == r {
                        idx[i] = -r;
                        i += 1;
                    }
                    if i == dim {
                        break;
                    }
                    idx[i] += 1;
                }
                assert_eq!(h.count(&a).unwrap(), brute);
                assert_eq!(h.points_in(&a).unwrap().len() as u128, brute);
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let mu = mu_locfin(unit_lattice(1));
        assert_eq!(derivative_at(&mu, &pt(&[0])).unwrap(), Bit::ONE);
        assert_eq!(derivative_at(&mu, &Point(vec![q(1, 2)])).unwrap(), Bit::ZERO);
        let r = derivability_probe(&mu, &pt(&[0]), q(1, 4), 200, 1).unwrap();
        assert!(r.pass && r.values.iter().all(|(_, v)| v.is_one()));
        let r = derivability_probe(&mu, &Point(vec![q(1, 2)]), q(1, 16), 200, 1).unwrap();
        assert!(r.pass && r.values.iter().all(|(_, v)| !v.is_one()));
        assert_eq!(analytic_epsilon_sq(&unit_lattice(1), &pt(&[0])), Some(q(1, 4)));
        assert_eq!(analytic_epsilon_sq(&unit_lattice(1), &Point(vec![q(1, 3)])), Some(q(1, 36)));
    }

    #[test]
    fn non_derivable_fixture_fails_with_witnesses() {
        // 1 when the box reaches to the left of 0
        let mu = DerivableMeasure::Declared {
            label: "left-reach".into(),
            dim: 1,
            eval: Arc::new(|a: &BoxUnion| Bit::from_bool(a.boxes().iter().any(|b| b.lo()[0] < qi(0)))),
            tolerance_sq: q(1, 100),
        };
        let r = derivability_probe(&mu, &pt(&[0]), q(1, 100), 100, 9).unwrap();
        assert!(!r.pass);
        assert!(r.witness.is_some());
        assert!(matches!(derivative_at(&mu, &pt(&[0])), Err(DerivableError::NotDerivable { .. })));
    }

    #[test]
    fn epsilon_soundness() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for dim in 1..=3 {
            for _ in 0..40 {
                let h = if rng.gen_bool(0.5) { sample_lattice(&mut rng, dim) } else { sample_finite_locfin(&mut rng, dim, 6, 3) };
                let x = if rng.gen_bool(0.3) {
                    match &h {
                        LocallyFiniteSet::Finite { points, .. } if !points.is_empty() => points.iter().next().unwrap().clone(),
                        _ => sample_point(&mut rng, dim, 3, 6),
                    }
                } else {
                    sample_point(&mut rng, dim, 3, 6)
                };
                let eps = analytic_epsilon_sq(&h, &x).unwrap_or(qi(1));
                let mu = mu_locfin(h.clone());
                let r = derivability_probe(&mu, &x, eps, 50, rng.r#gen()).unwrap();
                assert!(r.pass);
                assert_eq!(r.values[0].1, derivative_at(&mu, &x).unwrap());
                for (b, _) in &r.values {
                    assert!(diameter_sq(b).unwrap() < eps);
                }
            }
        }
    }

    #[test]
    fn support_and_reconstruction_examples() {
        let mu = mu_locfin(unit_lattice(1));
        let s = derivative_support(&mu, &BoxUnion::cuboid(&[(qi(0), q(5, 2))])).unwrap();
        assert_eq!(s, FiniteSet::new([pt(&[0]), pt(&[1]), pt(&[2])]));
        assert!(derivative_support(&mu, &BoxUnion::empty(1)).unwrap().is_empty());
        let h = mu_locfin(LocallyFiniteSet::finite(2, [pt(&[0, 0])]).unwrap());
        assert_eq!(derivative_support(&h, &bx(&[(0, 1), (0, 1)])).unwrap(), FiniteSet::new([pt(&[0, 0])]));
        let g = SparsePointFunction::new([pt(&[1]), pt(&[2])]);
        assert_eq!(reconstruct_measure(&g, 1).unwrap().eval(&bx(&[(0, 3)])).unwrap(), Bit::ZERO);
        let f = SparsePointFunction::new([pt(&[0])]);
        assert_eq!(integral_derivable(&f, &mu).unwrap(), Bit::ONE);
        let off = SparsePointFunction::new([Point(vec![q(1, 2)])]);
        assert_eq!(integral_derivable(&off, &mu).unwrap(), Bit::ZERO);
    }

    #[test]
    fn support_is_a_cap_h_and_gives_the_measure() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for dim in 1..=3 {
            for _ in 0..60 {
                let h = if rng.gen_bool(0.5) { sample_lattice(&mut rng, dim) } else { sample_finite_locfin(&mut rng, dim, 8, 3) };
                let a = sample_box_union(&mut rng, dim, 3, 3);
                let mu = mu_locfin(h.clone());
                let s = derivative_support(&mu, &a).unwrap();
                assert!(s.iter().all(|p| bx_member(&a, &p.0) && h.contains(p)));
                assert_eq!(parity(s.len()), mu.eval(&a).unwrap());
                let parts = sample_partition(&mut rng, &a, 4, 3);
                let xor: Bit = parts.iter().map(|p| mu.eval(p).unwrap()).collect();
                assert_eq!(xor, mu.eval(&a).unwrap());
            }
        }
    }
}
