//! The CHSH game: referees send uniform bits `x` to Alice and `y` to Bob,
//! who answer `a` and `b` without communicating and win when
//! `a XOR b = x AND y`.

use std::f64::consts::FRAC_PI_8;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::GadgetError;
use crate::freestate::{CMatrix, CVector, Effect, PureState, C64};

/// One player's deterministic answers, indexed by the question bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseTable(pub [bool; 2]);

impl ResponseTable {
    pub fn all() -> [ResponseTable; 4] {
        [
            ResponseTable([false, false]),
            ResponseTable([false, true]),
            ResponseTable([true, false]),
            ResponseTable([true, true]),
        ]
    }

    pub fn answer(&self, question: bool) -> bool {
        self.0[usize::from(question)]
    }

    fn label(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalStrategy {
    pub alice: ResponseTable,
    pub bob: ResponseTable,
}

impl ClassicalStrategy {
    /// Number of the four question pairs this strategy wins.
    pub fn wins(&self) -> u32 {
        let mut wins = 0;
        for x in [false, true] {
            for y in [false, true] {
                if self.alice.answer(x) ^ self.bob.answer(y) == (x && y) {
                    wins += 1;
                }
            }
        }
        wins
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(self.wins().into(), 4.into())
    }
}

/// Every deterministic strategy pair with its exact winning probability,
/// Alice's table varying slowest.
pub fn classical_table() -> Vec<(ClassicalStrategy, BigRational)> {
    let mut rows = Vec::with_capacity(16);
    for alice in ResponseTable::all() {
        for bob in ResponseTable::all() {
            let s = ClassicalStrategy { alice, bob };
            rows.push((s, s.value()));
        }
    }
    rows
}

/// CSV with columns `alice,bob,wins,value`; tables list answers to
/// question 0 then question 1.
pub fn classical_table_csv() -> String {
    let mut out = String::from("alice,bob,wins,value\n");
    for (s, v) in classical_table() {
        out.push_str(&format!("{},{},{},{}\n", s.alice.label(), s.bob.label(), s.wins(), v));
    }
    out
}

/// The best deterministic value and the first strategy attaining it.
/// Shared randomness cannot do better: its value is an average of
/// deterministic values.
pub fn classical_optimum() -> (BigRational, ClassicalStrategy) {
    let mut best: Option<(BigRational, ClassicalStrategy)> = None;
    for (s, v) in classical_table() {
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, s));
        }
    }
    best.expect("sixteen strategies")
}

/// Measurement angles in the X-Z plane. Outcome 0 is the projector onto
/// `cos(angle)|0> + sin(angle)|1>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumStrategy {
    pub alice: [f64; 2],
    pub bob: [f64; 2],
}

impl QuantumStrategy {
    /// Angles attaining the quantum optimum.
    pub fn optimal() -> Self {
        QuantumStrategy {
            alice: [0.0, 2.0 * FRAC_PI_8],
            bob: [FRAC_PI_8, -FRAC_PI_8],
        }
    }

    pub fn shifted(&self, offset: f64) -> Self {
        QuantumStrategy {
            alice: self.alice.map(|a| a + offset),
            bob: self.bob.map(|b| b + offset),
        }
    }
}

/// `(|00> + |11>) / sqrt 2`.
pub fn bell_pair() -> PureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = CVector::from_vec(vec![C64::new(h, 0.0), C64::zero(), C64::zero(), C64::new(h, 0.0)]);
    PureState::new(v).expect("unit vector")
}

fn outcome_projector(angle: f64, outcome: bool) -> CMatrix {
    let (c, s) = (angle.cos(), angle.sin());
    let (c, s) = if outcome { (-s, c) } else { (c, s) };
    let v = CVector::from_vec(vec![C64::new(c, 0.0), C64::new(s, 0.0)]);
    &v * v.adjoint()
}

/// Winning probability of `strategy` on the Bell pair, averaged over
/// uniform questions.
pub fn quantum_value(strategy: &QuantumStrategy) -> Result<f64, GadgetError> {
    for a in strategy.alice.iter().chain(&strategy.bob) {
        if !a.is_finite() {
            return Err(GadgetError::BadAngle(*a));
        }
    }
    let rho = bell_pair().density();
    let mut total = 0.0;
    for x in [false, true] {
        for y in [false, true] {
            for a in [false, true] {
                for b in [false, true] {
                    if a ^ b != (x && y) {
                        continue;
                    }
                    let joint = outcome_projector(strategy.alice[usize::from(x)], a)
                        .kronecker(&outcome_projector(strategy.bob[usize::from(y)], b));
                    let effect = Effect::new(joint).expect("product of projectors");
                    total += rho.probability(&effect);
                }
            }
        }
    }
    Ok(total / 4.0)
}

/// `cos^2(pi/8)`, the optimum over all quantum strategies.
pub fn quantum_optimum() -> f64 {
    FRAC_PI_8.cos().powi(2)
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
