//! Exact rationals and the extended line R ∪ {−∞, +∞}.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rational = Ratio<i128>;

/// Shorthand for building `num / den`.
///
/// Panics when `den == 0`; user-facing input goes through the literal parser,
/// which reports that case as an error instead.
pub fn q(num: i128, den: i128) -> Rational {
    Ratio::new(num, den)
}

/// Integer as a rational.
pub fn qi(n: i128) -> Rational {
    Ratio::from_integer(n)
}

/// A point of the extended rational line.
///
/// The derived ordering is the natural one: `NegInf` < every rational <
/// `PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRational {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl ExtRational {
    pub fn finite(self) -> Option<Rational> {
        match self {
            ExtRational::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }
}

impl From<Rational> for ExtRational {
    fn from(x: Rational) -> Self {
        ExtRational::Finite(x)
    }
}

impl From<i128> for ExtRational {
    fn from(n: i128) -> Self {
        ExtRational::Finite(qi(n))
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::NegInf => f.write_str("-inf"),
            ExtRational::Finite(x) => write!(f, "{}", DisplayRational(x)),
            ExtRational::PosInf => f.write_str("inf"),
        }
    }
}

/// Prints `p` or `p/q`, the form accepted back by the literal grammar.
pub struct DisplayRational<'a>(pub &'a Rational);

impl fmt::Display for DisplayRational<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.0;
        if *x.denom() == 1 {
            write!(f, "{}", x.numer())
        } else {
            write!(f, "{}/{}", x.numer(), x.denom())
        }
    }
}

/// Midpoint of two rationals.
pub fn midpoint(a: Rational, b: Rational) -> Rational {
    (a + b) / qi(2)
}

/// Largest rational with denominator `den` whose square does not exceed
/// `target`; used to turn squared analytic bounds into usable radii.
pub fn sqrt_lower_bound(target: Rational, den: i128) -> Rational {
    if target <= Rational::zero() {
        return Rational::zero();
    }
    // floor(sqrt(target) * den) via integer square root of target * den²
    let scaled = target * qi(den * den);
    let n = scaled.floor().to_integer();
    let mut r = isqrt(n);
    while qi((r + 1) * (r + 1)) <= scaled {
        r += 1;
    }
    q(r, den)
}

fn isqrt(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// `ceil(x)` as an integer.
pub fn ceil_int(x: Rational) -> i128 {
    x.ceil().to_integer()
}

/// `floor(x)` as an integer.
pub fn floor_int(x: Rational) -> i128 {
    x.floor().to_integer()
}

/// Absolute value helper kept here so callers need not import `Signed`.
pub fn abs(x: Rational) -> Rational {
    x.abs()
}

/// Least common multiple of the denominators, handy for grid oracles.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> i128 {
    xs.into_iter().fold(1i128, |acc, x| acc.lcm(x.denom()))
}
