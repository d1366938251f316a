//! Exact rationals used for every exponent, weight and intercept.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

pub type Rational = Ratio<i128>;

pub fn q(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

pub fn qi(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| *x.numer() as f64 / *x.denom() as f64)
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

/// "p/q" (or "p" for integers), the serialized form of every rational.
pub fn fmt_q(x: &Rational) -> String {
    x.to_string()
}

pub fn parse_q(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().ok()?;
            let d: i128 = d.trim().parse().ok()?;
            if d == 0 {
                None
            } else {
                Some(q(n, d))
            }
        }
        None => s.parse::<i128>().ok().map(qi),
    }
}

/// A rational or `+inf`. Only `l2` ever takes the infinite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(Rational),
    Infinity,
}

impl ExtRational {
    pub fn finite(&self) -> Option<Rational> {
        match self {
            ExtRational::Finite(x) => Some(*x),
            ExtRational::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRational::Finite(x) => to_f64(x),
            ExtRational::Infinity => f64::INFINITY,
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(x: Rational) -> Self {
        ExtRational::Finite(x)
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
            (ExtRational::Finite(_), ExtRational::Infinity) => Ordering::Less,
            (ExtRational::Infinity, ExtRational::Finite(_)) => Ordering::Greater,
            (ExtRational::Infinity, ExtRational::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(x) => write!(f, "{x}"),
            ExtRational::Infinity => write!(f, "inf"),
        }
    }
}

/// An interval of the rational line; the upper end may be `+inf` (always open then).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub lo_closed: bool,
    pub hi: ExtRational,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Interval {
            lo,
            lo_closed: true,
            hi: hi.into(),
            hi_closed: true,
        }
    }

    pub fn ray(lo: Rational) -> Self {
        Interval {
            lo,
            lo_closed: true,
            hi: ExtRational::Infinity,
            hi_closed: false,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let lo_ok = if self.lo_closed { *x >= self.lo } else { *x > self.lo };
        let hi_ok = match self.hi {
            ExtRational::Infinity => true,
            ExtRational::Finite(h) => {
                if self.hi_closed {
                    *x <= h
                } else {
                    *x < h
                }
            }
        };
        lo_ok && hi_ok
    }

    pub fn is_empty(&self) -> bool {
        match self.hi {
            ExtRational::Infinity => false,
            ExtRational::Finite(h) => h < self.lo || (h == self.lo && !(self.lo_closed && self.hi_closed)),
        }
    }

    pub fn is_point(&self) -> bool {
        self.hi == ExtRational::Finite(self.lo) && self.lo_closed && self.hi_closed
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

pub fn gcd_u(a: i128, b: i128) -> i128 {
    a.abs().gcd(&b.abs())
}

pub fn min_q(a: Rational, b: Rational) -> Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_q(a: Rational, b: Rational) -> Rational {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn is_positive(x: &Rational) -> bool {
    x.is_positive()
}

pub fn is_zero(x: &Rational) -> bool {
    x.is_zero()
}

/// 2×2 rational matrix, row major.
pub type Mat = [[Rational; 2]; 2];

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut c = [[qi(0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat_inv(a: &Mat) -> Mat {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]
}
