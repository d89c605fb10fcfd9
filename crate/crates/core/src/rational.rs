//! Exact arithmetic for distances, weights and tolerances.

use core::cmp::Ordering;
use core::fmt;
use core::ops::Add;

use num_traits::{Signed, Zero};

pub type Rational = num_rational::Ratio<i64>;

/// A distance that may be infinite (points in different islands of an
/// ∞-metric).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distance {
    Finite(Rational),
    Infinite,
}

impl Distance {
    pub fn zero() -> Self {
        Distance::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn finite(&self) -> Option<Rational> {
        match self {
            Distance::Finite(r) => Some(*r),
            Distance::Infinite => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Distance::Finite(r) if r.is_negative())
    }

    /// `self < eps` for a finite threshold.
    pub fn below(&self, eps: Rational) -> bool {
        match self {
            Distance::Finite(d) => *d < eps,
            Distance::Infinite => false,
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Distance::Finite(a), Distance::Finite(b)) => a.cmp(b),
            (Distance::Finite(_), Distance::Infinite) => Ordering::Less,
            (Distance::Infinite, Distance::Finite(_)) => Ordering::Greater,
            (Distance::Infinite, Distance::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for Distance {
    type Output = Distance;

    fn add(self, rhs: Distance) -> Distance {
        match (self, rhs) {
            (Distance::Finite(a), Distance::Finite(b)) => Distance::Finite(a + b),
            _ => Distance::Infinite,
        }
    }
}

impl From<Rational> for Distance {
    fn from(r: Rational) -> Self {
        Distance::Finite(r)
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(r) => write!(f, "{r}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Nearest `f64` to a rational.
pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_dominates() {
        let one = Distance::Finite(Rational::from_integer(1));
        assert!(one < Distance::Infinite);
        assert_eq!(one + Distance::Infinite, Distance::Infinite);
        assert!(!Distance::Infinite.below(Rational::from_integer(1_000_000)));
        assert!(one.below(Rational::new(3, 2)));
    }
}
