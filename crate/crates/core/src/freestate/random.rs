//! Random states, effects and freestates for sampling-based checks.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{eigh, CMatrix, CVector, DensityMatrix, Effect, Freestate, PureState, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v = CVector::from_fn(dim, |_, _| gaussian(rng));
        if let Some(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// Density matrix `G G* / Tr(G G*)` for a `dim x rank` Gaussian `G`.
pub fn density_matrix<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, rank.max(1), |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.unscale(tr);
    // symmetrize away rounding before validation
    DensityMatrix::new((&m + m.adjoint()).scale(0.5)).expect("Gram matrices are states")
}

/// `V diag(lambda) V*` with random eigenbasis and eigenvalues uniform in
/// `[0, 1]`.
pub fn effect<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Effect {
    let h = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let (_, vecs) = eigh(&(&h + h.adjoint()));
    let mut m = CMatrix::zeros(dim, dim);
    for v in &vecs {
        let lambda: f64 = rng.random();
        m += (v * v.adjoint()).scale(lambda);
    }
    Effect::new((&m + m.adjoint()).scale(0.5)).expect("eigenvalues in [0, 1]")
}

/// A freestate with `count` generators of mixed ranks.
pub fn freestate<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Freestate {
    let generators = (0..count.max(1))
        .map(|_| {
            let rank = rng.random_range(1..=dim);
            density_matrix(dim, rank, rng)
        })
        .collect();
    Freestate::new(generators).expect("nonempty")
}

/// Uniform point of the probability simplex with `n` vertices.
pub fn simplex_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}
