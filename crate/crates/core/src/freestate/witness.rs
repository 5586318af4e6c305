//! Witnesses that two freestates differ.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lp::Membership;
use super::{
    check_dim, eigh, functional_matrix, random, CMatrix, DensityMatrix, Freestate, FreestateError, Interval,
    PureState,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            restarts: 64,
            iterations: 200,
            seed: 0,
        }
    }
}

/// Which input holds the generator that lies outside the other hull.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    FirstOutsideSecond,
    SecondOutsideFirst,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `<psi|rho|psi>` lies outside the interval of `<psi|sigma|psi>` over
    /// the other hull by `gap`.
    Pure {
        side: Side,
        generator: usize,
        #[serde(serialize_with = "super::json::serialize_vector")]
        psi: PureState,
        value: f64,
        other: Interval,
        gap: f64,
    },
    /// `Re Tr(W rho)` lies outside the interval of `Re Tr(W sigma)` over the
    /// other hull by `gap`, with `W` Hermitian of operator norm 1.
    Hermitian {
        side: Side,
        generator: usize,
        #[serde(serialize_with = "super::json::serialize_matrix")]
        operator: CMatrix,
        value: f64,
        other: Interval,
        gap: f64,
    },
}

impl Witness {
    pub fn gap(&self) -> f64 {
        match self {
            Witness::Pure { gap, .. } | Witness::Hermitian { gap, .. } => *gap,
        }
    }

    pub fn side(&self) -> Side {
        match self {
            Witness::Pure { side, .. } | Witness::Hermitian { side, .. } => *side,
        }
    }
}

fn pure_score(psi: &PureState, rho: &DensityMatrix, other: &Freestate) -> (f64, Interval, f64) {
    let value = psi.expectation(rho.matrix());
    let interval = other.pure_interval(psi);
    (value, interval, interval.excess(value))
}

/// Shifted power steps on `rho - sigma` (or its negation) where `sigma` is
/// the currently extremal generator of the other hull.
fn ascend(
    start: PureState,
    rho: &DensityMatrix,
    other: &Freestate,
    above: bool,
    iterations: usize,
) -> PureState {
    let mut psi = start;
    let mut best = psi.clone();
    let mut best_score = f64::NEG_INFINITY;
    let mut step = 1.0;
    for _ in 0..iterations {
        let values: Vec<f64> = other
            .generators()
            .iter()
            .map(|g| psi.expectation(g.matrix()))
            .collect();
        let v = psi.expectation(rho.matrix());
        let (j, extremal) = values
            .iter()
            .copied()
            .enumerate()
            .fold((0, if above { f64::NEG_INFINITY } else { f64::INFINITY }), |acc, (j, x)| {
                if (above && x > acc.1) || (!above && x < acc.1) {
                    (j, x)
                } else {
                    acc
                }
            });
        let score = if above { v - extremal } else { extremal - v };
        if score > best_score {
            best_score = score;
            best = psi.clone();
        } else {
            step *= 0.7;
        }
        let diff = rho.matrix() - other.generators()[j].matrix();
        let direction = if above { diff } else { -diff };
        let next = psi.amplitudes() + (&direction * psi.amplitudes()).scale(step);
        match PureState::normalized(next) {
            Some(p) => psi = p,
            None => break,
        }
    }
    best
}

fn search_pure(
    rho: &DensityMatrix,
    other: &Freestate,
    functional: &CMatrix,
    opts: &WitnessOptions,
) -> (PureState, f64, Interval, f64) {
    let dim = rho.dim();
    let mut candidates: Vec<PureState> = Vec::new();
    // largest eigenvalues first: the LP functional points "above"
    let mut spectral = |m: &CMatrix| {
        for v in eigh(m).1.into_iter().rev() {
            if let Some(p) = PureState::normalized(v) {
                candidates.push(p);
            }
        }
    };
    spectral(functional);
    spectral(rho.matrix());
    for g in other.generators() {
        spectral(&(rho.matrix() - g.matrix()));
    }
    let mut best: Option<(PureState, f64, Interval, f64)> = None;
    let mut consider = |psi: PureState| {
        let (v, i, gap) = pure_score(&psi, rho, other);
        // on near-ties keep a witness whose value sits above the interval
        let wins = |b: &(PureState, f64, Interval, f64)| {
            gap > b.3 + 1e-12 || (gap >= b.3 - 1e-12 && v > i.hi && b.1 < b.2.lo)
        };
        if best.as_ref().is_none_or(wins) {
            best = Some((psi, v, i, gap));
        }
    };
    for c in &candidates {
        consider(c.clone());
        for above in [true, false] {
            consider(ascend(c.clone(), rho, other, above, opts.iterations));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for r in 0..opts.restarts {
        let start = random::pure_state(dim, &mut rng);
        consider(ascend(start, rho, other, r % 2 == 0, opts.iterations));
    }
    best.expect("at least one candidate")
}

/// Finds evidence that the hulls of `s1` and `s2` differ by more than
/// `tol`, or `None` when every generator of each lies in the other's hull.
pub fn separating_witness(
    s1: &Freestate,
    s2: &Freestate,
    tol: f64,
    opts: &WitnessOptions,
) -> Result<Option<Witness>, FreestateError> {
    check_dim(s1.dim(), s2.dim())?;
    let mut outside = None;
    'search: for (side, from, other) in [
        (Side::FirstOutsideSecond, s1, s2),
        (Side::SecondOutsideFirst, s2, s1),
    ] {
        for (index, rho) in from.generators().iter().enumerate() {
            if let Membership::Outside { functional, .. } = other.membership(rho)? {
                outside = Some((side, index, rho, other, functional));
                break 'search;
            }
        }
    }
    let Some((side, generator, rho, other, w)) = outside else {
        return Ok(None);
    };
    let raw = functional_matrix(&w, rho.dim());
    let (eigs, _) = eigh(&raw);
    let norm = eigs.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let operator = if norm > 0.0 { raw.unscale(norm) } else { raw };

    let (psi, value, interval, gap) = search_pure(rho, other, &operator, opts);
    if gap > tol {
        return Ok(Some(Witness::Pure {
            side,
            generator,
            psi,
            value,
            other: interval,
            gap,
        }));
    }
    let value = super::trace_product(&operator, rho.matrix());
    let interval = Interval::of_values(
        other
            .generators()
            .iter()
            .map(|g| super::trace_product(&operator, g.matrix())),
    );
    let gap = interval.excess(value);
    if gap > tol {
        return Ok(Some(Witness::Hermitian {
            side,
            generator,
            operator,
            value,
            other: interval,
            gap,
        }));
    }
    // the hulls differ by less than the requested resolution
    Ok(None)
}
