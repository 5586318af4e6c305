//! Freestates: convex sets of density matrices (or probability vectors)
//! given by finite generator lists, whose extremal probabilities are
//! intervals rather than single numbers.

mod json;
pub mod lp;
pub mod random;
mod witness;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

pub use witness::{separating_witness, Side, Witness, WitnessOptions};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for Hermiticity, positivity, trace and normalization checks.
pub const TOL: f64 = 1e-9;

/// Upper limit on generators produced by [`prob_mix`].
pub const MAX_GENERATORS: usize = 1 << 16;

#[derive(Debug, Error, PartialEq)]
pub enum FreestateError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0})")]
    NotPsd(f64),
    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),
    #[error("effect eigenvalues [{min}, {max}] leave [0, 1]")]
    EffectOutOfRange { min: f64, max: f64 },
    #[error("state vector has squared norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("a freestate needs at least one generator")]
    NoGenerators,
    #[error("mixture weights must be nonnegative and sum to 1 (sum {0})")]
    BadWeights(f64),
    #[error("probability vector {index} is invalid: {reason}")]
    BadDistribution { index: usize, reason: String },
    #[error("event outcome {outcome} is out of range for {n} outcomes")]
    BadEvent { outcome: usize, n: usize },
    #[error("mixture would produce {0} generators")]
    TooManyGenerators(usize),
    #[error("entry list of length {len} does not fill a {dim}x{dim} matrix")]
    BadEntries { len: usize, dim: usize },
}

fn check_dim(expected: usize, got: usize) -> Result<(), FreestateError> {
    if expected == got {
        Ok(())
    } else {
        Err(FreestateError::DimMismatch { expected, got })
    }
}

fn square_dim(m: &CMatrix) -> Result<usize, FreestateError> {
    if m.nrows() != m.ncols() {
        return Err(FreestateError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(FreestateError::ZeroDimension);
    }
    Ok(m.nrows())
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    m.iter()
        .zip(adj.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of the Hermitian part, eigenvalues ascending.
pub(crate) fn eigh(m: &CMatrix) -> (Vec<f64>, Vec<CVector>) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut pairs: Vec<(f64, CVector)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, eig.eigenvectors.column(i).into_owned()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// `Re Tr(a b)`.
fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

/// Real coordinates of a Hermitian matrix: the diagonal, then real and
/// imaginary parts of each entry above it, row by row.
pub(crate) fn hermitian_coords(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let mut out: Vec<f64> = (0..n).map(|k| m[(k, k)].re).collect();
    for k in 0..n {
        for l in k + 1..n {
            out.push(m[(k, l)].re);
            out.push(m[(k, l)].im);
        }
    }
    out
}

/// The Hermitian `W` with `Re Tr(W m) == w . hermitian_coords(m)`.
pub(crate) fn functional_matrix(w: &[f64], n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = C64::new(w[k], 0.0);
    }
    let mut at = n;
    for k in 0..n {
        for l in k + 1..n {
            let v = C64::new(w[at], w[at + 1]) * 0.5;
            m[(k, l)] = v;
            m[(l, k)] = v.conj();
            at += 2;
        }
    }
    m
}

/// A closed probability interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Signed distance by which `x` lies outside; negative inside.
    pub fn excess(&self, x: f64) -> f64 {
        (x - self.hi).max(self.lo - x)
    }

    fn of_values(values: impl IntoIterator<Item = f64>) -> Self {
        let (lo, hi) = values
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Interval { lo, hi }
    }

    /// Pulls endpoints within numerical slack of `[0, 1]` onto it.
    fn clamped(self) -> Self {
        let snap = |v: f64| {
            if (-TOL..0.0).contains(&v) {
                0.0
            } else if v > 1.0 && v <= 1.0 + TOL {
                1.0
            } else {
                v
            }
        };
        Interval {
            lo: snap(self.lo),
            hi: snap(self.hi),
        }
    }
}

/// A unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(CVector);

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self, FreestateError> {
        if amplitudes.is_empty() {
            return Err(FreestateError::ZeroDimension);
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > TOL {
            return Err(FreestateError::NotNormalized(norm_sq));
        }
        Ok(PureState(amplitudes))
    }

    /// Scales a nonzero vector to unit length.
    pub fn normalized(v: CVector) -> Option<Self> {
        let n = v.norm();
        (n > 0.0 && n.is_finite()).then(|| PureState(v.unscale(n)))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        PureState(v)
    }

    fn qubit(a: C64, b: C64) -> Self {
        PureState(CVector::from_vec(vec![a, b]))
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::qubit(C64::new(h, 0.0), C64::new(h, 0.0))
    }

    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::qubit(C64::new(h, 0.0), C64::new(-h, 0.0))
    }

    pub fn plus_i() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::qubit(C64::new(h, 0.0), C64::new(0.0, h))
    }

    pub fn minus_i() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::qubit(C64::new(h, 0.0), C64::new(0.0, -h))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.0.dotc(&other.0)
    }

    /// Equality up to a global phase.
    pub fn same_ray(&self, other: &PureState) -> bool {
        self.dim() == other.dim() && (self.inner(other).norm() - 1.0).abs() <= TOL
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix(&self.0 * self.0.adjoint())
    }

    /// `<psi| m |psi>` (real part).
    pub fn expectation(&self, m: &CMatrix) -> f64 {
        self.0.dotc(&(m * &self.0)).re
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

/// Checks the three density-matrix conditions, reporting the first failure.
pub fn validate_density(m: CMatrix) -> Result<DensityMatrix, FreestateError> {
    square_dim(&m)?;
    let dev = hermitian_deviation(&m);
    if dev > TOL {
        return Err(FreestateError::NotHermitian(dev));
    }
    let (eigs, _) = eigh(&m);
    if eigs[0] < -TOL {
        return Err(FreestateError::NotPsd(eigs[0]));
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > TOL {
        return Err(FreestateError::TraceNotOne(trace));
    }
    Ok(DensityMatrix(m))
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self, FreestateError> {
        validate_density(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(CMatrix::identity(dim, dim).unscale(dim as f64))
    }

    /// A diagonal density matrix from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self, FreestateError> {
        let d = DVector::from_iterator(probs.len(), probs.iter().map(|&p| C64::new(p, 0.0)));
        validate_density(CMatrix::from_diagonal(&d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    /// `Re Tr(E rho)`.
    pub fn probability(&self, effect: &Effect) -> f64 {
        trace_product(&effect.0, &self.0)
    }

    pub(crate) fn coords(&self) -> Vec<f64> {
        hermitian_coords(&self.0)
    }

    fn combine(terms: &[(f64, &DensityMatrix)]) -> DensityMatrix {
        let n = terms[0].1.dim();
        let m = terms
            .iter()
            .fold(CMatrix::zeros(n, n), |acc, (w, rho)| acc + rho.0.scale(*w));
        DensityMatrix(m)
    }
}

/// A measurement operator `0 <= E <= I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Effect(CMatrix);

impl Effect {
    pub fn new(m: CMatrix) -> Result<Self, FreestateError> {
        square_dim(&m)?;
        let dev = hermitian_deviation(&m);
        if dev > TOL {
            return Err(FreestateError::NotHermitian(dev));
        }
        let (eigs, _) = eigh(&m);
        let (min, max) = (eigs[0], eigs[eigs.len() - 1]);
        if min < -TOL || max > 1.0 + TOL {
            return Err(FreestateError::EffectOutOfRange { min, max });
        }
        Ok(Effect(m))
    }

    pub fn projector(psi: &PureState) -> Self {
        Effect(psi.density().0)
    }

    pub fn identity(dim: usize) -> Self {
        Effect(CMatrix::identity(dim, dim))
    }

    /// Projector onto the span of the listed basis vectors.
    pub fn diagonal_event(dim: usize, outcomes: &[usize]) -> Result<Self, FreestateError> {
        let mut d = DVector::from_element(dim, C64::new(0.0, 0.0));
        for &k in outcomes {
            if k >= dim {
                return Err(FreestateError::BadEvent { outcome: k, n: dim });
            }
            d[k] = C64::new(1.0, 0.0);
        }
        Ok(Effect(CMatrix::from_diagonal(&d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

/// The convex hull of finitely many density matrices of one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Freestate {
    dim: usize,
    generators: Vec<DensityMatrix>,
}

impl Freestate {
    pub fn new(generators: Vec<DensityMatrix>) -> Result<Self, FreestateError> {
        let dim = generators.first().ok_or(FreestateError::NoGenerators)?.dim();
        for g in &generators {
            check_dim(dim, g.dim())?;
        }
        Ok(Freestate { dim, generators })
    }

    pub fn singleton(rho: DensityMatrix) -> Self {
        Freestate {
            dim: rho.dim(),
            generators: vec![rho],
        }
    }

    pub fn from_pure(states: &[PureState]) -> Result<Self, FreestateError> {
        Self::new(states.iter().map(PureState::density).collect())
    }

    /// The hull of the six Pauli eigenstates: every qubit state.
    pub fn full_qubit() -> Self {
        Self::from_pure(&[
            PureState::basis(2, 0),
            PureState::basis(2, 1),
            PureState::plus(),
            PureState::minus(),
            PureState::plus_i(),
            PureState::minus_i(),
        ])
        .expect("qubit generators")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[DensityMatrix] {
        &self.generators
    }

    /// Extremal values of `Re Tr(E rho)` over the hull.
    pub fn effect_interval(&self, effect: &Effect) -> Result<Interval, FreestateError> {
        check_dim(self.dim, effect.dim())?;
        Ok(Interval::of_values(self.generators.iter().map(|g| g.probability(effect))).clamped())
    }

    /// Extremal values of `<psi|rho|psi>` over the hull.
    pub fn pure_interval(&self, psi: &PureState) -> Interval {
        Interval::of_values(self.generators.iter().map(|g| psi.expectation(g.matrix())))
    }

    /// Linear-feasibility test for `rho` lying in the hull.
    pub fn membership(&self, rho: &DensityMatrix) -> Result<lp::Membership, FreestateError> {
        check_dim(self.dim, rho.dim())?;
        let points: Vec<Vec<f64>> = self.generators.iter().map(DensityMatrix::coords).collect();
        Ok(lp::hull_membership(&points, &rho.coords()))
    }

    pub fn contains(&self, rho: &DensityMatrix) -> Result<bool, FreestateError> {
        Ok(self.membership(rho)?.is_inside())
    }

    /// Mutual hull membership of all generators.
    pub fn set_equal(&self, other: &Freestate) -> Result<bool, FreestateError> {
        check_dim(self.dim, other.dim)?;
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        for g in &other.generators {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The point `sum_j weights[j] * generator_j` (weights need not be
    /// normalized exactly; they are used as given).
    pub fn combination(&self, weights: &[f64]) -> DensityMatrix {
        let terms: Vec<(f64, &DensityMatrix)> = weights.iter().copied().zip(&self.generators).collect();
        DensityMatrix::combine(&terms)
    }
}

/// The hull of the union of two freestates.
pub fn knightian_or(a: &Freestate, b: &Freestate) -> Result<Freestate, FreestateError> {
    check_dim(a.dim, b.dim)?;
    let mut generators = a.generators.clone();
    generators.extend(b.generators.iter().cloned());
    Ok(Freestate { dim: a.dim, generators })
}

fn check_weights(weights: impl Iterator<Item = f64>) -> Result<(), FreestateError> {
    let mut sum = 0.0;
    for w in weights {
        if w.is_nan() || w < 0.0 {
            return Err(FreestateError::BadWeights(w));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > 1e-12 {
        return Err(FreestateError::BadWeights(sum));
    }
    Ok(())
}

/// Visits every choice of one index per list, last list varying fastest.
fn cartesian(sizes: &[usize], mut visit: impl FnMut(&[usize])) {
    let mut idx = vec![0; sizes.len()];
    loop {
        visit(&idx);
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn product_size(sizes: &[usize]) -> Result<usize, FreestateError> {
    sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .filter(|&n| n <= MAX_GENERATORS)
        .ok_or(FreestateError::TooManyGenerators(usize::MAX))
}

/// Probabilistic mixture of freestates: every weighted sum over one
/// generator choice per component.
pub fn prob_mix(components: &[(f64, &Freestate)]) -> Result<Freestate, FreestateError> {
    let first = components.first().ok_or(FreestateError::NoGenerators)?;
    check_weights(components.iter().map(|c| c.0))?;
    for (_, s) in components {
        check_dim(first.1.dim, s.dim)?;
    }
    let sizes: Vec<usize> = components.iter().map(|(_, s)| s.generators.len()).collect();
    product_size(&sizes)?;
    let mut generators = Vec::new();
    cartesian(&sizes, |idx| {
        let terms: Vec<(f64, &DensityMatrix)> = components
            .iter()
            .zip(idx)
            .map(|((w, s), &i)| (*w, &s.generators[i]))
            .collect();
        generators.push(DensityMatrix::combine(&terms));
    });
    Ok(Freestate {
        dim: first.1.dim,
        generators,
    })
}

/// `| |<psi|phi>| - |<psi|phi>|^2 | <= TOL`: a single unitary can clone
/// both states only when they are orthogonal or equal up to phase.
pub fn clone_feasible(psi: &PureState, phi: &PureState) -> Result<bool, FreestateError> {
    check_dim(psi.dim(), phi.dim())?;
    let m = psi.inner(phi).norm();
    Ok((m - m * m).abs() <= TOL)
}

/// Convex hull of probability vectors over `n` outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalFreestate {
    n: usize,
    generators: Vec<Vec<f64>>,
}

impl ClassicalFreestate {
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self, FreestateError> {
        let n = generators.first().ok_or(FreestateError::NoGenerators)?.len();
        if n == 0 {
            return Err(FreestateError::ZeroDimension);
        }
        for (index, g) in generators.iter().enumerate() {
            check_dim(n, g.len())?;
            if let Some(p) = g.iter().find(|p| p.is_nan() || **p < 0.0) {
                return Err(FreestateError::BadDistribution {
                    index,
                    reason: format!("negative or NaN entry {p}"),
                });
            }
            let sum: f64 = g.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(FreestateError::BadDistribution {
                    index,
                    reason: format!("entries sum to {sum}"),
                });
            }
        }
        Ok(ClassicalFreestate { n, generators })
    }

    /// Two-outcome generators `(1 - p, p)` for each listed `p`.
    pub fn bernoulli(ps: &[f64]) -> Result<Self, FreestateError> {
        Self::new(ps.iter().map(|&p| vec![1.0 - p, p]).collect())
    }

    pub fn n_outcomes(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// Extremal probabilities of the event (a set of outcomes; repeats are
    /// ignored).
    pub fn event_interval(&self, event: &[usize]) -> Result<Interval, FreestateError> {
        let mut outcomes = event.to_vec();
        outcomes.sort_unstable();
        outcomes.dedup();
        if let Some(&bad) = outcomes.iter().find(|&&k| k >= self.n) {
            return Err(FreestateError::BadEvent { outcome: bad, n: self.n });
        }
        Ok(Interval::of_values(
            self.generators
                .iter()
                .map(|g| outcomes.iter().map(|&k| g[k]).sum::<f64>()),
        ))
    }

    pub fn knightian_or(&self, other: &ClassicalFreestate) -> Result<ClassicalFreestate, FreestateError> {
        check_dim(self.n, other.n)?;
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        Ok(ClassicalFreestate { n: self.n, generators })
    }

    pub fn prob_mix(components: &[(f64, &ClassicalFreestate)]) -> Result<ClassicalFreestate, FreestateError> {
        let first = components.first().ok_or(FreestateError::NoGenerators)?;
        check_weights(components.iter().map(|c| c.0))?;
        for (_, s) in components {
            check_dim(first.1.n, s.n)?;
        }
        let n = first.1.n;
        let sizes: Vec<usize> = components.iter().map(|(_, s)| s.generators.len()).collect();
        product_size(&sizes)?;
        let mut generators = Vec::new();
        cartesian(&sizes, |idx| {
            let mut v = vec![0.0; n];
            for ((w, s), &i) in components.iter().zip(idx) {
                for (acc, p) in v.iter_mut().zip(&s.generators[i]) {
                    *acc += w * p;
                }
            }
            generators.push(v);
        });
        Ok(ClassicalFreestate { n, generators })
    }

    /// The same set as diagonal density matrices.
    pub fn to_quantum(&self) -> Freestate {
        Freestate::new(
            self.generators
                .iter()
                .map(|g| DensityMatrix::diagonal(g).expect("validated distribution"))
                .collect(),
        )
        .expect("nonempty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| c(v))))
    }

    fn ket0() -> DensityMatrix {
        PureState::basis(2, 0).density()
    }

    fn ket1() -> DensityMatrix {
        PureState::basis(2, 1).density()
    }

    #[test]
    fn density_validation() {
        assert!(validate_density(diag(&[0.5, 0.5])).is_ok());
        assert_eq!(validate_density(diag(&[1.5, -0.5])), Err(FreestateError::NotPsd(-0.5)));
        match validate_density(diag(&[0.6, 0.6])) {
            Err(FreestateError::TraceNotOne(t)) => assert!((t - 1.2).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let mut m = diag(&[0.5, 0.5]);
        m[(0, 1)] = C64::new(0.0, 0.1);
        assert!(matches!(validate_density(m), Err(FreestateError::NotHermitian(_))));
        assert!(matches!(
            validate_density(CMatrix::zeros(2, 3)),
            Err(FreestateError::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn or_of_basis_states() {
        let s = knightian_or(&Freestate::singleton(ket0()), &Freestate::singleton(ket1())).unwrap();
        assert_eq!(s.generators().len(), 2);
        let e = Effect::projector(&PureState::basis(2, 0));
        assert_eq!(s.effect_interval(&e).unwrap(), Interval { lo: 0.0, hi: 1.0 });
        let twice = knightian_or(&s, &s).unwrap();
        assert!(twice.set_equal(&s).unwrap());
        assert_eq!(twice.effect_interval(&e).unwrap(), s.effect_interval(&e).unwrap());
    }

    #[test]
    fn or_dimension_mismatch() {
        let a = Freestate::singleton(ket0());
        let b = Freestate::singleton(DensityMatrix::maximally_mixed(3));
        assert_eq!(knightian_or(&a, &b), Err(FreestateError::DimMismatch { expected: 2, got: 3 }));
    }

    #[test]
    fn classical_knight_example() {
        let single = ClassicalFreestate::bernoulli(&[0.1]).unwrap();
        let low = ClassicalFreestate::bernoulli(&[0.2, 0.3]).unwrap();
        let high = ClassicalFreestate::bernoulli(&[0.4, 0.5]).unwrap();
        let s = single.knightian_or(&low).unwrap().knightian_or(&high).unwrap();
        assert_eq!(s.event_interval(&[1]).unwrap(), Interval { lo: 0.1, hi: 0.5 });
        let pair = ClassicalFreestate::new(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        assert_eq!(pair.event_interval(&[1]).unwrap(), Interval { lo: 0.1, hi: 0.5 });
        assert_eq!(pair.event_interval(&[0, 1]).unwrap(), Interval { lo: 1.0, hi: 1.0 });
        let uniform = ClassicalFreestate::bernoulli(&[0.5]).unwrap();
        assert_eq!(uniform.event_interval(&[1]).unwrap(), Interval::point(0.5));
        assert_eq!(pair.event_interval(&[2]), Err(FreestateError::BadEvent { outcome: 2, n: 2 }));
    }

    #[test]
    fn classical_validation() {
        assert!(matches!(
            ClassicalFreestate::new(vec![vec![0.5, 0.6]]),
            Err(FreestateError::BadDistribution { index: 0, .. })
        ));
        assert!(matches!(
            ClassicalFreestate::new(vec![vec![1.5, -0.5]]),
            Err(FreestateError::BadDistribution { .. })
        ));
        assert_eq!(ClassicalFreestate::new(vec![]), Err(FreestateError::NoGenerators));
    }

    #[test]
    fn mixing_examples() {
        let s = Freestate::full_qubit();
        let same = prob_mix(&[(1.0, &s)]).unwrap();
        assert_eq!(same, s);
        let m = prob_mix(&[(0.5, &Freestate::singleton(ket0())), (0.5, &Freestate::singleton(ket1()))]).unwrap();
        assert_eq!(m.generators().len(), 1);
        assert!((m.generators()[0].matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm() < 1e-15);
        assert!(matches!(prob_mix(&[(0.4, &s), (0.5, &s)]), Err(FreestateError::BadWeights(_))));
        assert!(matches!(prob_mix(&[(1.5, &s), (-0.5, &s)]), Err(FreestateError::BadWeights(_))));
    }

    #[test]
    fn intervals_of_point_and_full_qubit() {
        let e = Effect::projector(&PureState::basis(2, 0));
        let mixed = Freestate::singleton(DensityMatrix::maximally_mixed(2));
        assert_eq!(mixed.effect_interval(&e).unwrap(), Interval::point(0.5));
        assert_eq!(Freestate::full_qubit().effect_interval(&e).unwrap(), Interval { lo: 0.0, hi: 1.0 });
    }

    #[test]
    fn effect_validation() {
        assert!(Effect::new(diag(&[0.0, 1.0])).is_ok());
        assert!(matches!(Effect::new(diag(&[1.2, 0.0])), Err(FreestateError::EffectOutOfRange { .. })));
        assert!(matches!(Effect::new(diag(&[-0.2, 0.0])), Err(FreestateError::EffectOutOfRange { .. })));
    }

    #[test]
    fn cloning_criterion() {
        let k0 = PureState::basis(2, 0);
        let k1 = PureState::basis(2, 1);
        assert!(clone_feasible(&k0, &k1).unwrap());
        assert!(clone_feasible(&k0, &k0).unwrap());
        assert!(!clone_feasible(&k0, &PureState::plus()).unwrap());
        let phased = PureState::new(k0.amplitudes() * C64::new(0.0, 1.0)).unwrap();
        assert!(clone_feasible(&k0, &phased).unwrap());
        assert!(k0.same_ray(&phased));
        assert!(matches!(
            clone_feasible(&k0, &PureState::basis(3, 0)),
            Err(FreestateError::DimMismatch { .. })
        ));
    }

    #[test]
    fn membership_in_qubit_hulls() {
        let pm = Freestate::from_pure(&[PureState::plus(), PureState::minus()]).unwrap();
        assert!(pm.contains(&DensityMatrix::maximally_mixed(2)).unwrap());
        assert!(!pm.contains(&ket0()).unwrap());
        assert!(Freestate::full_qubit().contains(&PureState::basis(2, 1).density()).unwrap());
    }

    #[test]
    fn functional_matrix_matches_coordinates() {
        let w = [0.3, -0.2, 0.7, 1.1];
        let m = functional_matrix(&w, 2);
        let rho = PureState::plus_i().density();
        let lhs = trace_product(&m, rho.matrix());
        let rhs: f64 = w.iter().zip(rho.coords()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
