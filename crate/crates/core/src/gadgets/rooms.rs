//! Anthropic room puzzles: a coin decides how many copies of an observer
//! exist, each in a painted room, and the observer conditions on the color
//! of their own room.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::GadgetError;
use crate::arena::Probability;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rooms {
    pub color: String,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomPuzzle {
    pub prior_heads: Probability,
    pub heads: Vec<Rooms>,
    pub tails: Vec<Rooms>,
    pub observed_color: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountingRule {
    /// Likelihood of the color is the fraction of copies in the branch that
    /// see it.
    CopyWeighted,
    /// Likelihood is 1 when some copy in the branch sees the color, else 0.
    BranchWeighted,
    /// Likelihood is the number of copies that see the color, so branches
    /// with more such observers count for more.
    CopyCount,
}

impl CountingRule {
    pub const ALL: [CountingRule; 3] = [
        CountingRule::CopyWeighted,
        CountingRule::BranchWeighted,
        CountingRule::CopyCount,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Posterior {
    pub rule: CountingRule,
    #[serde(serialize_with = "super::newcomb::ser_rational")]
    pub heads: BigRational,
    #[serde(serialize_with = "super::newcomb::ser_rational")]
    pub tails: BigRational,
}

impl RoomPuzzle {
    pub fn validate(&self) -> Result<(), GadgetError> {
        for (name, branch) in [("heads", &self.heads), ("tails", &self.tails)] {
            if branch.iter().map(|r| r.count).sum::<u64>() == 0 {
                return Err(GadgetError::BadPuzzle(format!("the {name} branch has no copies")));
            }
        }
        if self.matching(&self.heads) + self.matching(&self.tails) == 0 {
            return Err(GadgetError::NoMatchingRoom(self.observed_color.clone()));
        }
        Ok(())
    }

    fn matching(&self, branch: &[Rooms]) -> u64 {
        branch
            .iter()
            .filter(|r| r.color == self.observed_color)
            .map(|r| r.count)
            .sum()
    }

    fn likelihood(&self, branch: &[Rooms], rule: CountingRule) -> BigRational {
        let hits = self.matching(branch);
        let total: u64 = branch.iter().map(|r| r.count).sum();
        match rule {
            CountingRule::CopyWeighted => BigRational::new(hits.into(), total.into()),
            CountingRule::BranchWeighted if hits > 0 => BigRational::one(),
            CountingRule::BranchWeighted => BigRational::zero(),
            CountingRule::CopyCount => BigRational::from_integer(hits.into()),
        }
    }

    /// The first branch-weighted puzzle: heads makes `big` white rooms,
    /// tails a single white room.
    pub fn all_white(big: u64) -> Self {
        RoomPuzzle {
            prior_heads: Probability::ratio(1, 2),
            heads: vec![Rooms { color: "white".into(), count: big }],
            tails: vec![Rooms { color: "white".into(), count: 1 }],
            observed_color: "white".into(),
        }
    }

    /// Heads makes `big` rooms of which one is white and the rest blue;
    /// tails makes one white room.
    pub fn mostly_blue(big: u64) -> Self {
        RoomPuzzle {
            prior_heads: Probability::ratio(1, 2),
            heads: vec![
                Rooms { color: "blue".into(), count: big - 1 },
                Rooms { color: "white".into(), count: 1 },
            ],
            tails: vec![Rooms { color: "white".into(), count: 1 }],
            observed_color: "white".into(),
        }
    }
}

/// Posterior over the coin after seeing `observed_color`.
pub fn posterior(puzzle: &RoomPuzzle, rule: CountingRule) -> Result<Posterior, GadgetError> {
    puzzle.validate()?;
    let prior = puzzle.prior_heads.value();
    let h = prior * puzzle.likelihood(&puzzle.heads, rule);
    let t = (BigRational::one() - prior) * puzzle.likelihood(&puzzle.tails, rule);
    let total = &h + &t;
    if total.is_zero() {
        // the observation is impossible under this rule given the prior
        return Err(GadgetError::NoMatchingRoom(puzzle.observed_color.clone()));
    }
    Ok(Posterior {
        rule,
        heads: &h / &total,
        tails: &t / &total,
    })
}

/// Posteriors under every counting rule.
pub fn posteriors(puzzle: &RoomPuzzle) -> Result<Vec<Posterior>, GadgetError> {
    CountingRule::ALL.iter().map(|r| posterior(puzzle, *r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn mostly_blue_rooms() {
        let p = RoomPuzzle::mostly_blue(1000);
        assert_eq!(posterior(&p, CountingRule::CopyWeighted).unwrap().heads, r(1, 1001));
        assert_eq!(posterior(&p, CountingRule::BranchWeighted).unwrap().heads, r(1, 2));
        assert_eq!(posterior(&p, CountingRule::CopyCount).unwrap().heads, r(1, 2));
    }

    #[test]
    fn all_white_rooms() {
        let p = RoomPuzzle::all_white(1000);
        assert_eq!(posterior(&p, CountingRule::CopyWeighted).unwrap().heads, r(1, 2));
        assert_eq!(posterior(&p, CountingRule::CopyCount).unwrap().heads, r(1000, 1001));
    }

    #[test]
    fn certain_prior_and_coherence() {
        let mut p = RoomPuzzle::mostly_blue(1000);
        p.prior_heads = Probability::ratio(1, 1);
        for post in posteriors(&p).unwrap() {
            assert_eq!(post.heads, r(1, 1));
        }
        p.prior_heads = Probability::ratio(2, 7);
        for post in posteriors(&p).unwrap() {
            assert_eq!(&post.heads + &post.tails, r(1, 1));
        }
    }

    #[test]
    fn unseen_color_is_an_error() {
        let mut p = RoomPuzzle::all_white(3);
        p.observed_color = "green".into();
        assert_eq!(posterior(&p, CountingRule::CopyWeighted), Err(GadgetError::NoMatchingRoom("green".into())));
        let json = r#"{"prior_heads":"1/2","heads":[{"color":"w","count":1}],"tails":[],"observed_color":"w"}"#;
        let p: RoomPuzzle = serde_json::from_str(json).unwrap();
        assert!(matches!(p.validate(), Err(GadgetError::BadPuzzle(_))));
    }
}
