//! Newcomb's problem with a predictor of given accuracy. The opaque box
//! holds the large prize exactly when the predictor foresaw one-boxing;
//! the transparent box always holds the small prize.

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize, Serializer};

use crate::arena::Probability;

pub(crate) fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    OneBox,
    TwoBox,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Payoffs {
    /// Content of the opaque box when filled.
    pub large: u64,
    /// Content of the transparent box.
    pub small: u64,
}

impl Default for Payoffs {
    fn default() -> Self {
        Payoffs {
            large: 1_000_000,
            small: 1_000,
        }
    }
}

/// Expected winnings of `policy` against a predictor that is right with
/// probability `accuracy`.
pub fn expected(payoffs: Payoffs, accuracy: &Probability, policy: Policy) -> BigRational {
    let acc = accuracy.value();
    let large = BigRational::from_integer(payoffs.large.into());
    let small = BigRational::from_integer(payoffs.small.into());
    match policy {
        Policy::OneBox => acc * large,
        Policy::TwoBox => (BigRational::one() - acc) * large + small,
    }
}

/// Accuracy at which both policies pay the same:
/// `(large + small) / (2 large)`. `None` when the large prize is zero.
pub fn crossover(payoffs: Payoffs) -> Option<BigRational> {
    (payoffs.large > 0).then(|| {
        BigRational::new(
            (u128::from(payoffs.large) + u128::from(payoffs.small)).into(),
            (2 * u128::from(payoffs.large)).into(),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn perfect_predictor() {
        let p = Payoffs::default();
        let one = Probability::ratio(1, 1);
        assert_eq!(expected(p, &one, Policy::OneBox), int(1_000_000));
        assert_eq!(expected(p, &one, Policy::TwoBox), int(1_000));
    }

    #[test]
    fn coin_flip_predictor_and_crossover() {
        let p = Payoffs::default();
        let half = Probability::ratio(1, 2);
        assert_eq!(expected(p, &half, Policy::OneBox), int(500_000));
        assert_eq!(expected(p, &half, Policy::TwoBox), int(501_000));
        let at = Probability::ratio(1001, 2000);
        assert_eq!(expected(p, &at, Policy::TwoBox), int(500_500));
        let x = crossover(p).unwrap();
        assert_eq!(x, BigRational::new(1001.into(), 2000.into()));
        let at = Probability::new(x.clone()).unwrap();
        assert_eq!(expected(p, &at, Policy::OneBox), expected(p, &at, Policy::TwoBox));
    }
}
