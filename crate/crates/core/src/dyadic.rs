//! Exact nonnegative dyadic rationals `n / 2^k`.

use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use serde::{Serialize, Serializer};

/// Largest supported denominator exponent.
pub const MAX_EXPONENT: u32 = 120;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: u128,
    exponent: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { numerator: 0, exponent: 0 };
    pub const ONE: Dyadic = Dyadic { numerator: 1, exponent: 0 };

    pub fn new(numerator: u128, exponent: u32) -> Self {
        assert!(exponent <= MAX_EXPONENT, "dyadic exponent {exponent} too large");
        Dyadic { numerator, exponent }.reduced()
    }

    /// `2^(-k)`.
    pub fn pow2_neg(k: u32) -> Self {
        Dyadic::new(1, k)
    }

    pub fn numerator(&self) -> u128 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn half(self) -> Self {
        Dyadic::new(self.numerator, self.exponent + 1)
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 * (-(self.exponent as f64)).exp2()
    }

    fn reduced(mut self) -> Self {
        if self.numerator == 0 {
            return Dyadic::ZERO;
        }
        let tz = self.numerator.trailing_zeros().min(self.exponent);
        self.numerator >>= tz;
        self.exponent -= tz;
        self
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        let exponent = self.exponent.max(rhs.exponent);
        let a = self
            .numerator
            .checked_shl(exponent - self.exponent)
            .expect("dyadic overflow");
        let b = rhs
            .numerator
            .checked_shl(exponent - rhs.exponent)
            .expect("dyadic overflow");
        Dyadic::new(a.checked_add(b).expect("dyadic overflow"), exponent)
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, Add::add)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let exponent = self.exponent.max(other.exponent);
        let a = self.numerator << (exponent - self.exponent);
        let b = other.numerator << (exponent - other.exponent);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, 1u128 << self.exponent)
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
