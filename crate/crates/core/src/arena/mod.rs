//! A prediction game between a predictor and a finite-state subject.
//!
//! The predictor watches `t` steps of (input, behavior) pairs, then commits
//! to a forecast of behaviors at times `t..u` as a function of the future
//! inputs. The forecast is scored by exact variation distance against the
//! subject's true distribution given its hidden state at time `t`. Freebits
//! not yet used are set by an adversary after seeing the forecast, or drawn
//! up front in oblivious mode.

mod forecast;
mod subject;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};
use thiserror::Error;

use crate::bits::BitString;

pub use forecast::{
    check_causality, forecast_distribution, variation_distance, BayesFilter, Constant, Forecast, Predictor,
    PredictorSpec, TableLearner,
};
pub use subject::{
    catalog, Branch, EdgeSpec, Probability, Subject, SubjectKind, SubjectSpec, SubjectState, MAX_FREEBIT_BUDGET,
};

/// Exact distribution over behavior strings.
pub type Distribution = BTreeMap<BitString, BigRational>;

/// Longest forecast window that is enumerated exactly.
pub const MAX_HORIZON: usize = 20;

/// Most freebits the adversary searches over.
pub const MAX_ADVERSARY_FREEBITS: usize = 16;

/// Causality probes per trial.
pub const CAUSALITY_PROBES: usize = 32;

pub const CLASSIFY_NOTE: &str = "this verdict concerns only the predictors supplied; \
    a failing class is unpredicted by them, not shown unpredictable in general";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("invalid subject: {0}")]
    BadSubject(String),
    #[error("state {state} has no edge for input {input}")]
    MissingTransition { state: usize, input: u8 },
    #[error("freebit index {index} is outside the budget of {budget}")]
    FreebitOutOfBudget { index: usize, budget: usize },
    #[error("freebit {index} can be used twice (second use at step {step})")]
    FreebitReused { index: usize, step: usize },
    #[error("assignment has {got} values for a budget of {budget}")]
    BadAssignment { got: usize, budget: usize },
    #[error("not a probability: {0}")]
    BadProbability(String),
    #[error("window of {horizon} steps exceeds the limit of {limit}")]
    HorizonTooLong { horizon: usize, limit: usize },
    #[error("{budget} freebits exceed the limit of {limit}")]
    BudgetTooLarge { budget: usize, limit: usize },
    #[error("forecast at step {step} depends on later inputs")]
    ForecastViolatesCausality { step: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryMode {
    /// Unused freebits are chosen after the forecast to maximize distance;
    /// freebits spent while the predictor watches read as 0.
    #[default]
    Adversarial,
    /// All freebits are drawn uniformly before the trial starts.
    Oblivious,
}

/// Inputs are independent bits that are 1 with probability `p_one`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputModel {
    pub p_one: f64,
}

impl Default for InputModel {
    fn default() -> Self {
        InputModel { p_one: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    /// Steps the predictor watches.
    pub t: usize,
    /// End of the forecast window (exclusive).
    pub u: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: usize,
    #[serde(default)]
    pub input_model: InputModel,
    pub seed: u64,
    #[serde(default)]
    pub adversary: AdversaryMode,
}

impl GameConfig {
    pub fn validate(&self) -> Result<(), ArenaError> {
        let bad = |why: String| Err(ArenaError::BadConfig(why));
        if self.t >= self.u {
            return bad(format!("need t < u, got t = {} and u = {}", self.t, self.u));
        }
        if self.u - self.t > MAX_HORIZON {
            return Err(ArenaError::HorizonTooLong {
                horizon: self.u - self.t,
                limit: MAX_HORIZON,
            });
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return bad(format!("epsilon {} not in (0, 1]", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta {} not in (0, 1)", self.delta));
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.input_model.p_one) {
            return bad(format!("input p_one {} not in [0, 1]", self.input_model.p_one));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Exact distance as a rational string.
    pub distance: String,
    pub distance_f64: f64,
    pub passed: bool,
    pub inputs: BitString,
    /// Values of every freebit in index order.
    pub freebits: BitString,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub subject: String,
    pub predictor: String,
    pub config: GameConfig,
    pub seed: u64,
    pub trials: usize,
    pub passes: usize,
    pub pass_fraction: f64,
    /// Clopper-Pearson 95% interval for the pass probability.
    pub confidence_95: [f64; 2],
    /// Whether the pass fraction reaches `1 - delta`.
    pub passed: bool,
    pub max_distance: String,
    pub records: Vec<TrialRecord>,
    pub version: &'static str,
}

/// Exact two-sided Clopper-Pearson interval at level `1 - alpha`.
pub fn clopper_pearson(successes: usize, trials: usize, alpha: f64) -> [f64; 2] {
    assert!(successes <= trials && trials > 0);
    let (x, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0).expect("positive shapes").inverse_cdf(alpha / 2.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x).expect("positive shapes").inverse_cdf(1.0 - alpha / 2.0)
    };
    [lo, hi]
}

/// Picks values for the freebits marked `None` in `fixed` that maximize the
/// distance between `forecast` and the subject's behavior on `inputs` from
/// `start`. Ties go to the lexicographically first assignment.
pub fn adversary_resolution(
    subject: &Subject,
    start: SubjectState,
    inputs: &[bool],
    forecast: &Distribution,
    fixed: &[Option<bool>],
) -> Result<(Vec<bool>, BigRational), ArenaError> {
    if fixed.len() != subject.freebit_budget() {
        return Err(ArenaError::BadAssignment {
            got: fixed.len(),
            budget: subject.freebit_budget(),
        });
    }
    let free: Vec<usize> = (0..fixed.len()).filter(|&i| fixed[i].is_none()).collect();
    if free.len() > MAX_ADVERSARY_FREEBITS {
        return Err(ArenaError::BudgetTooLarge {
            budget: free.len(),
            limit: MAX_ADVERSARY_FREEBITS,
        });
    }
    let mut best: Option<(Vec<bool>, BigRational)> = None;
    for choice in BitString::all_of_length(free.len()) {
        let mut assignment: Vec<bool> = fixed.iter().map(|v| v.unwrap_or(false)).collect();
        for (slot, bit) in free.iter().zip(choice.bits()) {
            assignment[*slot] = *bit;
        }
        let truth = subject.true_distribution_from(start, inputs, &assignment)?;
        let d = variation_distance(forecast, &truth);
        if best.as_ref().is_none_or(|(_, b)| d > *b) {
            best = Some((assignment, d));
        }
    }
    Ok(best.expect("at least the empty assignment"))
}

/// The per-trial random stream: one ChaCha8 stream per trial index.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Plays one trial and returns its record.
pub fn play_trial(
    subject: &Subject,
    predictor: &PredictorSpec,
    cfg: &GameConfig,
    trial: usize,
) -> Result<TrialRecord, ArenaError> {
    let mut rng = trial_rng(cfg.seed, trial);
    let budget = subject.freebit_budget();
    let inputs: Vec<bool> = (0..cfg.u).map(|_| rng.random_bool(cfg.input_model.p_one)).collect();
    let drawn: Vec<bool> = (0..budget).map(|_| rng.random()).collect();
    let oblivious = cfg.adversary == AdversaryMode::Oblivious;

    let mut learner = predictor.build(subject);
    let mut state = subject.start();
    for &input in &inputs[..cfg.t] {
        let (behavior, next) = subject.step(state, input, &mut rng, |i| oblivious && drawn[i]);
        learner.observe(input, behavior);
        state = next;
    }
    let forecast = learner.forecast();
    let horizon = cfg.u - cfg.t;
    check_causality(forecast.as_ref(), horizon, CAUSALITY_PROBES, &mut rng)?;
    let future = &inputs[cfg.t..];
    let predicted = forecast_distribution(forecast.as_ref(), future)?;

    let (assignment, distance) = if oblivious {
        let truth = subject.true_distribution_from(state, future, &drawn)?;
        let d = variation_distance(&predicted, &truth);
        (drawn, d)
    } else {
        let fixed: Vec<Option<bool>> = (0..budget).map(|i| state.is_consumed(i).then_some(false)).collect();
        adversary_resolution(subject, state, future, &predicted, &fixed)?
    };
    let epsilon = BigRational::from_float(cfg.epsilon).expect("finite epsilon");
    Ok(TrialRecord {
        trial,
        distance_f64: distance.to_f64().unwrap_or(f64::NAN),
        passed: distance < epsilon,
        distance: distance.to_string(),
        inputs: BitString::from_bits(inputs),
        freebits: BitString::from_bits(assignment),
    })
}

/// Plays `cfg.trials` independent trials.
pub fn run_game(subject: &Subject, predictor: &PredictorSpec, cfg: &GameConfig) -> Result<Verdict, ArenaError> {
    cfg.validate()?;
    subject.check_depletion(cfg.u)?;
    let mut records = Vec::with_capacity(cfg.trials);
    let mut max = BigRational::zero();
    for trial in 0..cfg.trials {
        let rec = play_trial(subject, predictor, cfg, trial)?;
        let d: BigRational = rec.distance.parse().expect("rational we just printed");
        if d > max {
            max = d;
        }
        records.push(rec);
    }
    let passes = records.iter().filter(|r| r.passed).count();
    let pass_fraction = passes as f64 / cfg.trials as f64;
    Ok(Verdict {
        subject: subject.name().to_string(),
        predictor: predictor.name(),
        config: cfg.clone(),
        seed: cfg.seed,
        trials: cfg.trials,
        passes,
        pass_fraction,
        confidence_95: clopper_pearson(passes, cfg.trials, 0.05),
        passed: pass_fraction >= 1.0 - cfg.delta,
        max_distance: max.to_string(),
        records,
        version: crate::ARTIFACT_VERSION,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceClass {
    pub name: String,
    pub members: Vec<SubjectSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleEntry {
    pub t: usize,
    pub epsilon: f64,
    pub delta: f64,
}

/// Settings shared by every game in a classification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    /// Forecast window length `u - t`.
    pub horizon: usize,
    pub trials: usize,
    pub schedule: Vec<ScheduleEntry>,
    #[serde(default)]
    pub input_model: InputModel,
    pub seed: u64,
    #[serde(default)]
    pub adversary: AdversaryMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassStatus {
    MechanisticAtScale,
    UnpredictedAtScale,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub predictor: String,
    pub member: String,
    pub t: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub pass_fraction: f64,
    pub max_distance: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    pub class: String,
    pub status: ClassStatus,
    /// First predictor that passed every member at every schedule entry.
    pub predictor: Option<String>,
    pub cells: Vec<Cell>,
    pub note: &'static str,
}

/// A class is mechanistic at scale when one supplied predictor passes every
/// member at every schedule entry.
pub fn classify(
    classes: &[ReferenceClass],
    predictors: &[PredictorSpec],
    cfg: &ClassifyConfig,
) -> Result<Vec<ClassReport>, ArenaError> {
    if predictors.is_empty() || cfg.schedule.is_empty() {
        return Err(ArenaError::BadConfig("need at least one predictor and schedule entry".into()));
    }
    let mut reports = Vec::with_capacity(classes.len());
    for class in classes {
        let subjects = class
            .members
            .iter()
            .cloned()
            .map(Subject::new)
            .collect::<Result<Vec<_>, _>>()?;
        let mut cells = Vec::new();
        let mut winner = None;
        for p in predictors {
            let mut all = true;
            for entry in &cfg.schedule {
                let game = GameConfig {
                    t: entry.t,
                    u: entry.t + cfg.horizon,
                    epsilon: entry.epsilon,
                    delta: entry.delta,
                    trials: cfg.trials,
                    input_model: cfg.input_model,
                    seed: cfg.seed,
                    adversary: cfg.adversary,
                };
                for s in &subjects {
                    let v = run_game(s, p, &game)?;
                    all &= v.passed;
                    cells.push(Cell {
                        predictor: v.predictor,
                        member: v.subject,
                        t: entry.t,
                        epsilon: entry.epsilon,
                        delta: entry.delta,
                        pass_fraction: v.pass_fraction,
                        max_distance: v.max_distance,
                        passed: v.passed,
                    });
                }
            }
            if all && winner.is_none() {
                winner = Some(p.name());
            }
        }
        reports.push(ClassReport {
            class: class.name.clone(),
            status: if winner.is_some() {
                ClassStatus::MechanisticAtScale
            } else {
                ClassStatus::UnpredictedAtScale
            },
            predictor: winner,
            cells,
            note: CLASSIFY_NOTE,
        });
    }
    Ok(reports)
}

/// The shipped reference classes. Freebit members spend their freebit at
/// step `freebit_delay`.
pub fn standard_classes(freebit_delay: usize) -> Vec<ReferenceClass> {
    vec![
        ReferenceClass {
            name: "deterministic".into(),
            members: vec![catalog::parrot(), catalog::inverter(), catalog::xor_pair()],
        },
        ReferenceClass {
            name: "noisy".into(),
            members: vec![catalog::noisy_coin(), catalog::noisy_parrot(Probability::ratio(3, 4))],
        },
        ReferenceClass {
            name: "freebit".into(),
            members: vec![catalog::freebit_chain(freebit_delay)],
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn cfg(t: usize, u: usize, trials: usize) -> GameConfig {
        GameConfig {
            t,
            u,
            epsilon: 0.05,
            delta: 0.05,
            trials,
            input_model: InputModel::default(),
            seed: 7,
            adversary: AdversaryMode::Adversarial,
        }
    }

    /// Two freebits spent at steps 0 and 1, then echo.
    fn two_freebits() -> Subject {
        let mut edges = Vec::new();
        for i in 0..2u8 {
            for (from, index) in [(0, 0), (1, 1)] {
                edges.push(EdgeSpec {
                    from,
                    on_input: i,
                    to: from + 1,
                    emit: None,
                    prob: None,
                    freebit_index: Some(index),
                });
            }
            edges.push(EdgeSpec {
                from: 2,
                on_input: i,
                to: 2,
                emit: Some(i),
                prob: None,
                freebit_index: None,
            });
        }
        Subject::new(SubjectSpec {
            name: "two-freebits".into(),
            kind: SubjectKind::Freebit,
            states: 3,
            initial: 0,
            edges,
            freebit_budget: 2,
        })
        .unwrap()
    }

    #[test]
    fn adversary_prefers_the_unlikely_corner() {
        let s = two_freebits();
        let inputs = [false, false];
        let f = forecast_distribution(&Constant(r(9, 10)), &inputs).unwrap();
        let (a, d) = adversary_resolution(&s, s.start(), &inputs, &f, &[None, None]).unwrap();
        assert_eq!(a, vec![false, false]);
        assert_eq!(d, r(99, 100));
    }

    #[test]
    fn adversary_breaks_ties_lexicographically() {
        let s = two_freebits();
        let inputs = [false, false];
        let f = forecast_distribution(&Constant(r(1, 2)), &inputs).unwrap();
        let (a, d) = adversary_resolution(&s, s.start(), &inputs, &f, &[None, None]).unwrap();
        assert_eq!(a, vec![false, false]);
        assert_eq!(d, r(3, 4));
        let (a, _) = adversary_resolution(&s, s.start(), &inputs, &f, &[Some(true), None]).unwrap();
        assert_eq!(a, vec![true, false]);
    }

    #[test]
    fn adversary_budget_guard() {
        let mut edges = Vec::new();
        for k in 0..17 {
            for i in 0..2u8 {
                edges.push(EdgeSpec {
                    from: k,
                    on_input: i,
                    to: k + 1,
                    emit: None,
                    prob: None,
                    freebit_index: Some(k),
                });
            }
        }
        for i in 0..2u8 {
            edges.push(EdgeSpec {
                from: 17,
                on_input: i,
                to: 17,
                emit: Some(0),
                prob: None,
                freebit_index: None,
            });
        }
        let s = Subject::new(SubjectSpec {
            name: "wide".into(),
            kind: SubjectKind::Freebit,
            states: 18,
            initial: 0,
            edges,
            freebit_budget: 17,
        })
        .unwrap();
        let f = Distribution::new();
        assert_eq!(
            adversary_resolution(&s, s.start(), &[false], &f, &[None; 17]),
            Err(ArenaError::BudgetTooLarge { budget: 17, limit: 16 })
        );
    }

    #[test]
    fn clopper_pearson_edges() {
        assert_eq!(clopper_pearson(0, 10, 0.05)[0], 0.0);
        assert_eq!(clopper_pearson(10, 10, 0.05)[1], 1.0);
        // all successes: lower end is (alpha/2)^(1/n)
        let lo = clopper_pearson(10, 10, 0.05)[0];
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-9);
        let [a, b] = clopper_pearson(5, 10, 0.05);
        assert!((a + b - 1.0).abs() < 1e-9 && a < 0.5 && b > 0.5);
    }

    #[test]
    fn deterministic_subject_is_learned() {
        let s = Subject::new(catalog::parrot()).unwrap();
        let v = run_game(&s, &PredictorSpec::TableLearner { window: 1 }, &cfg(40, 46, 50)).unwrap();
        assert!(v.passed, "{v:?}");
        let v = run_game(&s, &PredictorSpec::BayesFilter, &cfg(10, 16, 20)).unwrap();
        assert_eq!(v.max_distance, "0");
    }

    #[test]
    fn freebit_forces_half() {
        let s = Subject::new(catalog::freebit_chain(12)).unwrap();
        for p in PredictorSpec::defaults() {
            let v = run_game(&s, &p, &cfg(10, 14, 30)).unwrap();
            for rec in &v.records {
                let d: BigRational = rec.distance.parse().unwrap();
                assert!(d >= r(1, 2), "{} {}", p.name(), rec.distance);
            }
            assert!(!v.passed);
        }
    }

    #[test]
    fn oblivious_mode_uses_drawn_freebits() {
        let s = Subject::new(catalog::freebit_chain(2)).unwrap();
        let mut c = cfg(4, 6, 20);
        c.adversary = AdversaryMode::Oblivious;
        // the freebit is spent while the predictor watches, so nothing is
        // left to chance in the window
        let v = run_game(&s, &PredictorSpec::BayesFilter, &c).unwrap();
        assert!(v.records.iter().any(|r| r.freebits.bits()[0]));
        assert_eq!(v.max_distance, "0");
    }

    #[test]
    fn replay_is_byte_identical() {
        let s = Subject::new(catalog::noisy_parrot(Probability::ratio(3, 4))).unwrap();
        let p = PredictorSpec::TableLearner { window: 1 };
        let a = serde_json::to_string(&run_game(&s, &p, &cfg(20, 24, 10)).unwrap()).unwrap();
        let b = serde_json::to_string(&run_game(&s, &p, &cfg(20, 24, 10)).unwrap()).unwrap();
        assert_eq!(a, b);
        let mut other = cfg(20, 24, 10);
        other.seed = 8;
        let c = serde_json::to_string(&run_game(&s, &p, &other).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn config_validation() {
        assert!(cfg(5, 5, 1).validate().is_err());
        assert_eq!(
            cfg(0, 21, 1).validate(),
            Err(ArenaError::HorizonTooLong { horizon: 21, limit: 20 })
        );
        let mut c = cfg(0, 4, 1);
        c.delta = 1.0;
        assert!(c.validate().is_err());
        let strict = r#"{"t":1,"u":2,"epsilon":0.1,"delta":0.1,"trials":1,"sead":3}"#;
        assert!(serde_json::from_str::<GameConfig>(strict).is_err());
    }

    #[test]
    fn classify_standard_classes() {
        let c = ClassifyConfig {
            horizon: 4,
            trials: 20,
            schedule: vec![
                ScheduleEntry { t: 30, epsilon: 0.05, delta: 0.1 },
                ScheduleEntry { t: 32, epsilon: 0.05, delta: 0.1 },
            ],
            input_model: InputModel::default(),
            seed: 3,
            adversary: AdversaryMode::Adversarial,
        };
        let reports = classify(&standard_classes(33), &PredictorSpec::defaults(), &c).unwrap();
        let status: Vec<_> = reports.iter().map(|r| (r.class.as_str(), r.status)).collect();
        assert_eq!(
            status,
            vec![
                ("deterministic", ClassStatus::MechanisticAtScale),
                ("noisy", ClassStatus::MechanisticAtScale),
                ("freebit", ClassStatus::UnpredictedAtScale),
            ]
        );
        assert_eq!(reports[1].predictor.as_deref(), Some("bayes-filter"));
        let json = serde_json::to_string(&reports[2]).unwrap();
        assert!(json.contains("unpredicted-at-scale") && json.contains("only the predictors supplied"));
    }

    #[test]
    fn distance_is_one_for_disjoint_point_masses() {
        let a = Distribution::from([("01".parse().unwrap(), BigRational::one())]);
        let b = Distribution::from([("10".parse().unwrap(), BigRational::one())]);
        assert_eq!(variation_distance(&a, &b), BigRational::one());
    }
}
