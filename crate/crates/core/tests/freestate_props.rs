use freebit_core::freestate::{
    clone_feasible, knightian_or, prob_mix, random, separating_witness, CMatrix, DensityMatrix, Effect,
    Freestate, PureState, Witness, WitnessOptions, C64,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Re Tr(a b)` by explicit index loops.
fn tr(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s.re
}

/// `<psi|m|psi>` by explicit index loops.
fn quad(psi: &PureState, m: &CMatrix) -> f64 {
    let a = psi.amplitudes();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..a.len() {
        for j in 0..a.len() {
            s += a[i].conj() * m[(i, j)] * a[j];
        }
    }
    s.re
}

fn dirichlet_weights(k: usize, alpha: f64, r: &mut ChaCha8Rng) -> Vec<f64> {
    let g = Gamma::new(alpha, 1.0).unwrap();
    loop {
        let raw: Vec<f64> = (0..k).map(|_| g.sample(r)).collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            return raw.into_iter().map(|x| x / total).collect();
        }
    }
}

fn brute_interval(s: &Freestate, e: &Effect) -> (f64, f64) {
    s.generators()
        .iter()
        .map(|g| tr(e.matrix(), g.matrix()))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn or_interval_law(seed in any::<u64>(), dim in 1usize..=4, k1 in 1usize..5, k2 in 1usize..5) {
        let mut r = rng(seed);
        let s1 = random::freestate(dim, k1, &mut r);
        let s2 = random::freestate(dim, k2, &mut r);
        let e = random::effect(dim, &mut r);
        let both = knightian_or(&s1, &s2).unwrap().effect_interval(&e).unwrap();
        let i1 = s1.effect_interval(&e).unwrap();
        let i2 = s2.effect_interval(&e).unwrap();
        prop_assert_eq!(both.lo, i1.lo.min(i2.lo));
        prop_assert_eq!(both.hi, i1.hi.max(i2.hi));
    }

    #[test]
    fn mixture_interval_linearity(seed in any::<u64>(), dim in 1usize..=4, parts in 1usize..4) {
        let mut r = rng(seed);
        let sets: Vec<Freestate> = (0..parts).map(|_| {
            let k = r.random_range(1..4);
            random::freestate(dim, k, &mut r)
        }).collect();
        let mut weights = random::simplex_weights(parts, &mut r);
        let excess: f64 = weights.iter().sum::<f64>() - 1.0;
        weights[0] -= excess;
        prop_assume!(weights[0] >= 0.0);
        let comps: Vec<(f64, &Freestate)> = weights.iter().copied().zip(sets.iter()).collect();
        let mixed = prob_mix(&comps).unwrap();
        let expected: usize = sets.iter().map(|s| s.generators().len()).product();
        prop_assert_eq!(mixed.generators().len(), expected);
        let e = random::effect(dim, &mut r);
        let (lo, hi) = brute_interval(&mixed, &e);
        let lo_sum: f64 = comps.iter().map(|(w, s)| w * brute_interval(s, &e).0).sum();
        let hi_sum: f64 = comps.iter().map(|(w, s)| w * brute_interval(s, &e).1).sum();
        prop_assert!((lo - lo_sum).abs() <= 1e-9);
        prop_assert!((hi - hi_sum).abs() <= 1e-9);
    }

    #[test]
    fn interval_nesting(seed in any::<u64>(), dim in 1usize..=4, k in 1usize..5) {
        let mut r = rng(seed);
        let big = random::freestate(dim, k, &mut r);
        let inner: Vec<DensityMatrix> = (0..3).map(|_| {
            let w = random::simplex_weights(k, &mut r);
            let m = big.combination(&w);
            DensityMatrix::new((m.matrix() + m.matrix().adjoint()).scale(0.5)).unwrap()
        }).collect();
        let small = Freestate::new(inner).unwrap();
        for g in small.generators() {
            prop_assert!(big.contains(g).unwrap());
        }
        for _ in 0..100 {
            let e = random::effect(dim, &mut r);
            let a = small.effect_interval(&e).unwrap();
            let b = big.effect_interval(&e).unwrap();
            prop_assert!(a.lo >= b.lo - 1e-9 && a.hi <= b.hi + 1e-9);
        }
    }

    #[test]
    fn witnesses_reverify(seed in any::<u64>(), dim in 1usize..=3, k1 in 1usize..4, k2 in 1usize..4) {
        let mut r = rng(seed);
        let s1 = random::freestate(dim, k1, &mut r);
        let s2 = random::freestate(dim, k2, &mut r);
        let tol = 1e-6;
        let opts = WitnessOptions { restarts: 16, ..WitnessOptions::default() };
        match separating_witness(&s1, &s2, tol, &opts).unwrap() {
            None => prop_assert!(s1.set_equal(&s2).unwrap()),
            Some(w) => check_witness(&w, &s1, &s2, tol)?,
        }
    }

    #[test]
    fn cloning_symmetry(seed in any::<u64>(), dim in 1usize..=4) {
        let mut r = rng(seed);
        let psi = random::pure_state(dim, &mut r);
        let phi = random::pure_state(dim, &mut r);
        prop_assert_eq!(clone_feasible(&psi, &phi).unwrap(), clone_feasible(&phi, &psi).unwrap());
        let theta: f64 = r.random::<f64>() * std::f64::consts::TAU;
        let phased = PureState::new(psi.amplitudes() * C64::from_polar(1.0, theta)).unwrap();
        prop_assert!(clone_feasible(&psi, &phased).unwrap());
    }
}

fn check_witness(w: &Witness, s1: &Freestate, s2: &Freestate, tol: f64) -> Result<(), TestCaseError> {
    let (from, other) = match w.side() {
        freebit_core::freestate::Side::FirstOutsideSecond => (s1, s2),
        freebit_core::freestate::Side::SecondOutsideFirst => (s2, s1),
    };
    match w {
        Witness::Pure { generator, psi, .. } => {
            let v = quad(psi, from.generators()[*generator].matrix());
            let vals: Vec<f64> = other.generators().iter().map(|g| quad(psi, g.matrix())).collect();
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let gap = (v - hi).max(lo - v);
            prop_assert!(gap > tol, "pure gap {gap}");
            prop_assert!((gap - w.gap()).abs() < 1e-9);
        }
        Witness::Hermitian { generator, operator, .. } => {
            let v = tr(operator, from.generators()[*generator].matrix());
            let vals: Vec<f64> = other.generators().iter().map(|g| tr(operator, g.matrix())).collect();
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((v - hi).max(lo - v) > tol);
        }
    }
    Ok(())
}

#[test]
fn monte_carlo_hull_sampling() {
    let mut r = rng(11);
    for dim in 1..=4 {
        for _ in 0..5 {
            let k = r.random_range(1..=4);
            let s = random::freestate(dim, k, &mut r);
            let e = random::effect(dim, &mut r);
            let interval = s.effect_interval(&e).unwrap();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for _ in 0..10_000 {
                let w = dirichlet_weights(k, 0.2, &mut r);
                let v = tr(e.matrix(), s.combination(&w).matrix());
                assert!(interval.contains(v, 1e-9), "{v} outside {interval:?}");
                lo = lo.min(v);
                hi = hi.max(v);
            }
            assert!(lo - interval.lo <= 0.02 && interval.hi - hi <= 0.02);
        }
    }
}

#[test]
fn distinct_qubit_hulls_get_pure_witnesses() {
    let mut r = rng(3);
    let opts = WitnessOptions::default();
    for _ in 0..20 {
        let s1 = random::freestate(2, 2, &mut r);
        let s2 = random::freestate(2, 3, &mut r);
        let w = separating_witness(&s1, &s2, 1e-6, &opts).unwrap().expect("random hulls differ");
        assert!(matches!(w, Witness::Pure { .. }), "{w:?}");
        check_witness(&w, &s1, &s2, 1e-6).unwrap();
    }
}
