//! Forecasts, predictors and the distance between distributions.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::subject::{Branch, Probability, Subject};
use super::{ArenaError, Distribution, MAX_HORIZON};
use crate::bits::BitString;

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// Half the L1 distance between two finitely supported distributions.
/// Missing keys count as zero mass.
pub fn variation_distance<K: Ord>(a: &BTreeMap<K, BigRational>, b: &BTreeMap<K, BigRational>) -> BigRational {
    let mut total = BigRational::zero();
    for (k, p) in a {
        match b.get(k) {
            Some(q) => total += (p - q).abs(),
            None => total += p.abs(),
        }
    }
    for (k, q) in b {
        if !a.contains_key(k) {
            total += q.abs();
        }
    }
    total * half()
}

/// A conditional model of future behavior.
///
/// `prob_one(inputs, behaviors)` is the probability that the next behavior
/// bit is 1, where `behaviors` are the bits already emitted inside the
/// forecast window and `inputs` is the whole future input sequence. A
/// causal forecast may only read `inputs[..=behaviors.len()]`.
pub trait Forecast {
    fn prob_one(&self, inputs: &[bool], behaviors: &[bool]) -> BigRational;
}

/// The joint distribution a forecast assigns to behaviors on `inputs`.
pub fn forecast_distribution(f: &dyn Forecast, inputs: &[bool]) -> Result<Distribution, ArenaError> {
    if inputs.len() > MAX_HORIZON {
        return Err(ArenaError::HorizonTooLong {
            horizon: inputs.len(),
            limit: MAX_HORIZON,
        });
    }
    let mut layer: Vec<(Vec<bool>, BigRational)> = vec![(Vec::new(), BigRational::one())];
    for _ in 0..inputs.len() {
        let mut next = Vec::with_capacity(layer.len() * 2);
        for (prefix, p) in layer {
            let one = f.prob_one(inputs, &prefix);
            if one < BigRational::zero() || one > BigRational::one() {
                return Err(ArenaError::BadProbability(one.to_string()));
            }
            let zero = BigRational::one() - &one;
            for (bit, q) in [(false, zero), (true, one)] {
                if !q.is_zero() {
                    let mut b = prefix.clone();
                    b.push(bit);
                    next.push((b, &p * q));
                }
            }
        }
        layer = next;
    }
    Ok(layer.into_iter().map(|(b, p)| (BitString::from_bits(b), p)).collect())
}

/// Probes a forecast for dependence on inputs it may not read yet.
///
/// Each probe draws inputs, a time `v` and behaviors before `v`, then
/// flips a random nonempty subset of the inputs after `v` and also each of
/// them singly; any change in the conditional is a violation.
pub fn check_causality<R: Rng + ?Sized>(
    f: &dyn Forecast,
    horizon: usize,
    probes: usize,
    rng: &mut R,
) -> Result<(), ArenaError> {
    if horizon < 2 {
        return Ok(());
    }
    for _ in 0..probes {
        let inputs: Vec<bool> = (0..horizon).map(|_| rng.random()).collect();
        let v = rng.random_range(0..horizon - 1);
        let behaviors: Vec<bool> = (0..v).map(|_| rng.random()).collect();
        let base = f.prob_one(&inputs, &behaviors);
        let mut flips: Vec<Vec<usize>> = ((v + 1)..horizon).map(|j| vec![j]).collect();
        let mut subset: Vec<usize> = ((v + 1)..horizon).filter(|_| rng.random()).collect();
        if subset.is_empty() {
            subset.push(horizon - 1);
        }
        flips.push(subset);
        for flip in flips {
            let mut other = inputs.clone();
            for j in flip {
                other[j] = !other[j];
            }
            if f.prob_one(&other, &behaviors) != base {
                return Err(ArenaError::ForecastViolatesCausality { step: v });
            }
        }
    }
    Ok(())
}

/// A learner that watches the subject and then commits to a forecast.
pub trait Predictor {
    fn name(&self) -> String;
    fn observe(&mut self, input: bool, behavior: bool);
    fn forecast(&self) -> Box<dyn Forecast>;
}

/// Serializable choice of predictor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PredictorSpec {
    /// Empirical next-bit frequencies keyed on the last `window`
    /// (input, behavior) pairs plus the current input.
    TableLearner { window: usize },
    /// Exact filtering over the subject's known transition structure, with
    /// freebit edges modelled as fair coins.
    BayesFilter,
    /// Every bit is 1 with probability `p`, independently.
    Constant { p: Probability },
}

impl PredictorSpec {
    pub fn name(&self) -> String {
        match self {
            PredictorSpec::TableLearner { window } => format!("table-learner-{window}"),
            PredictorSpec::BayesFilter => "bayes-filter".into(),
            PredictorSpec::Constant { p } => format!("constant-{p}"),
        }
    }

    /// Builds a fresh predictor. The subject is the structural knowledge a
    /// filter may use; learners ignore it.
    pub fn build(&self, subject: &Subject) -> Box<dyn Predictor> {
        match self {
            PredictorSpec::TableLearner { window } => Box::new(TableLearner::new(*window)),
            PredictorSpec::BayesFilter => Box::new(BayesFilter::new(subject.clone())),
            PredictorSpec::Constant { p } => Box::new(Constant(p.value().clone())),
        }
    }

    /// The predictors used when none are given.
    pub fn defaults() -> Vec<PredictorSpec> {
        vec![
            PredictorSpec::TableLearner { window: 1 },
            PredictorSpec::BayesFilter,
            PredictorSpec::Constant {
                p: Probability::ratio(1, 2),
            },
        ]
    }
}

#[derive(Clone, Debug)]
pub struct Constant(pub BigRational);

impl Predictor for Constant {
    fn name(&self) -> String {
        format!("constant-{}", self.0)
    }

    fn observe(&mut self, _input: bool, _behavior: bool) {}

    fn forecast(&self) -> Box<dyn Forecast> {
        Box::new(self.clone())
    }
}

impl Forecast for Constant {
    fn prob_one(&self, _inputs: &[bool], _behaviors: &[bool]) -> BigRational {
        self.0.clone()
    }
}

type Context = (Vec<(bool, bool)>, bool);

#[derive(Clone, Debug)]
pub struct TableLearner {
    window: usize,
    history: Vec<(bool, bool)>,
    counts: HashMap<Context, [u64; 2]>,
}

impl TableLearner {
    pub fn new(window: usize) -> Self {
        TableLearner {
            window,
            history: Vec::new(),
            counts: HashMap::new(),
        }
    }

    fn context(&self, recent: &[(bool, bool)], input: bool) -> Option<Context> {
        (recent.len() >= self.window).then(|| (recent[recent.len() - self.window..].to_vec(), input))
    }
}

impl Predictor for TableLearner {
    fn name(&self) -> String {
        format!("table-learner-{}", self.window)
    }

    fn observe(&mut self, input: bool, behavior: bool) {
        if let Some(ctx) = self.context(&self.history, input) {
            self.counts.entry(ctx).or_insert([0, 0])[usize::from(behavior)] += 1;
        }
        self.history.push((input, behavior));
    }

    fn forecast(&self) -> Box<dyn Forecast> {
        let keep = self.history.len().saturating_sub(self.window);
        Box::new(TableForecast {
            learner: TableLearner {
                window: self.window,
                history: self.history[keep..].to_vec(),
                counts: self.counts.clone(),
            },
        })
    }
}

struct TableForecast {
    learner: TableLearner,
}

impl Forecast for TableForecast {
    fn prob_one(&self, inputs: &[bool], behaviors: &[bool]) -> BigRational {
        let v = behaviors.len();
        let mut recent = self.learner.history.clone();
        recent.extend(inputs[..v].iter().copied().zip(behaviors.iter().copied()));
        let counts = self
            .learner
            .context(&recent, inputs[v])
            .and_then(|ctx| self.learner.counts.get(&ctx));
        match counts {
            Some([n0, n1]) if n0 + n1 > 0 => BigRational::new((*n1).into(), (n0 + n1).into()),
            _ => half(),
        }
    }
}

type Belief = BTreeMap<usize, BigRational>;

/// Emission and transition weights of one step, summed over edges.
fn step_weights(subject: &Subject, state: usize, input: bool) -> Vec<(BigRational, bool, usize)> {
    match subject.branch_at(state, input) {
        Branch::Fixed { emit, to } => vec![(BigRational::one(), *emit, *to)],
        Branch::Random(edges) => edges.clone(),
        Branch::Freebit { to, .. } => vec![(half(), false, *to), (half(), true, *to)],
    }
}

fn filter(subject: &Subject, belief: &Belief, input: bool, behavior: bool) -> Belief {
    let mut next = Belief::new();
    for (s, p) in belief {
        for (q, emit, to) in step_weights(subject, *s, input) {
            if emit == behavior && !q.is_zero() {
                *next.entry(to).or_insert_with(BigRational::zero) += p * q;
            }
        }
    }
    let total: BigRational = next.values().sum();
    if total.is_zero() {
        return Belief::new();
    }
    next.values_mut().for_each(|p| *p /= &total);
    next
}

fn uniform(states: usize) -> Belief {
    let w = BigRational::new(1.into(), states.into());
    (0..states).map(|s| (s, w.clone())).collect()
}

#[derive(Clone, Debug)]
pub struct BayesFilter {
    subject: Subject,
    belief: Belief,
}

impl BayesFilter {
    pub fn new(subject: Subject) -> Self {
        let belief = Belief::from([(subject.start().state, BigRational::one())]);
        BayesFilter { subject, belief }
    }

    pub fn belief(&self) -> &BTreeMap<usize, BigRational> {
        &self.belief
    }
}

impl Predictor for BayesFilter {
    fn name(&self) -> String {
        "bayes-filter".into()
    }

    fn observe(&mut self, input: bool, behavior: bool) {
        self.belief = filter(&self.subject, &self.belief, input, behavior);
        if self.belief.is_empty() {
            // the observation contradicts the model; start over agnostic
            self.belief = uniform(self.subject.states());
        }
    }

    fn forecast(&self) -> Box<dyn Forecast> {
        Box::new(self.clone())
    }
}

impl Forecast for BayesFilter {
    fn prob_one(&self, inputs: &[bool], behaviors: &[bool]) -> BigRational {
        let mut belief = self.belief.clone();
        for (i, b) in inputs.iter().zip(behaviors) {
            belief = filter(&self.subject, &belief, *i, *b);
        }
        if belief.is_empty() {
            return half();
        }
        let input = inputs[behaviors.len()];
        let mut one = BigRational::zero();
        for (s, p) in &belief {
            for (q, emit, _) in step_weights(&self.subject, *s, input) {
                if emit {
                    one += p * q;
                }
            }
        }
        one
    }
}
