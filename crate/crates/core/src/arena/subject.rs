//! Finite-state subjects with deterministic, probabilistic and
//! freebit-consuming transitions.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ArenaError, Distribution, MAX_HORIZON};
use crate::bits::BitString;

/// An exact probability in `[0, 1]`. Serialized as a string such as
/// `"3/4"`; parsed from `"p/q"`, a decimal string, or a JSON number (read
/// by its shortest decimal form, so `0.1` means exactly `1/10`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Probability(BigRational);

impl Probability {
    pub fn new(value: BigRational) -> Result<Self, ArenaError> {
        if value < BigRational::zero() || value > BigRational::one() {
            return Err(ArenaError::BadProbability(value.to_string()));
        }
        Ok(Probability(value))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Probability::new(BigRational::new(BigInt::from(n), BigInt::from(d))).expect("probability in range")
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let v = BigRational::new(digits, scale);
    Some(if neg { -v } else { v })
}

impl FromStr for Probability {
    type Err = ArenaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let value = match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| ArenaError::BadProbability(s.into()))?;
                let d: BigInt = d.trim().parse().map_err(|_| ArenaError::BadProbability(s.into()))?;
                if d.is_zero() {
                    return Err(ArenaError::BadProbability(s.into()));
                }
                BigRational::new(n, d)
            }
            None => parse_decimal(s).ok_or_else(|| ArenaError::BadProbability(s.into()))?,
        };
        Probability::new(value)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Probability {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Probability {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Text(String),
            Number(f64),
        }
        let text = match Wire::deserialize(d)? {
            Wire::Text(s) => s,
            Wire::Number(x) => format!("{x}"),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubjectKind {
    Deterministic,
    Noisy,
    Freebit,
    GerbilHybrid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: usize,
    pub on_input: u8,
    pub to: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prob: Option<Probability>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freebit_index: Option<usize>,
}

impl EdgeSpec {
    fn fixed(from: usize, on_input: u8, to: usize, emit: u8) -> Self {
        EdgeSpec {
            from,
            on_input,
            to,
            emit: Some(emit),
            prob: None,
            freebit_index: None,
        }
    }

    fn random(from: usize, on_input: u8, to: usize, emit: u8, prob: Probability) -> Self {
        EdgeSpec {
            prob: Some(prob),
            ..Self::fixed(from, on_input, to, emit)
        }
    }

    fn freebit(from: usize, on_input: u8, to: usize, index: usize) -> Self {
        EdgeSpec {
            from,
            on_input,
            to,
            emit: None,
            prob: None,
            freebit_index: Some(index),
        }
    }
}

/// The JSON-facing description of a subject.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubjectSpec {
    #[serde(default)]
    pub name: String,
    pub kind: SubjectKind,
    pub states: usize,
    #[serde(default)]
    pub initial: usize,
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub freebit_budget: usize,
}

/// What a subject does in one state on one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Branch {
    Fixed { emit: bool, to: usize },
    Random(Vec<(BigRational, bool, usize)>),
    /// Emits the value of freebit `index` and moves to `to`.
    Freebit { index: usize, to: usize },
}

/// Physical state of a running subject: the automaton state plus the set of
/// freebits already used up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubjectState {
    pub state: usize,
    pub consumed: u64,
}

impl SubjectState {
    pub fn is_consumed(&self, index: usize) -> bool {
        self.consumed >> index & 1 == 1
    }
}

/// A validated subject.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subject {
    spec: SubjectSpec,
    table: Vec<[Branch; 2]>,
}

/// Freebit indices must fit the consumed-set bitmask.
pub const MAX_FREEBIT_BUDGET: usize = 64;

impl Subject {
    pub fn new(spec: SubjectSpec) -> Result<Self, ArenaError> {
        if spec.states == 0 || spec.initial >= spec.states {
            return Err(ArenaError::BadSubject(format!(
                "initial state {} with {} states",
                spec.initial, spec.states
            )));
        }
        if spec.freebit_budget > MAX_FREEBIT_BUDGET {
            return Err(ArenaError::BudgetTooLarge {
                budget: spec.freebit_budget,
                limit: MAX_FREEBIT_BUDGET,
            });
        }
        let mut groups: BTreeMap<(usize, u8), Vec<&EdgeSpec>> = BTreeMap::new();
        for e in &spec.edges {
            if e.from >= spec.states || e.to >= spec.states {
                return Err(ArenaError::BadSubject(format!("edge {} -> {} leaves the state range", e.from, e.to)));
            }
            if e.on_input > 1 || e.emit.is_some_and(|b| b > 1) {
                return Err(ArenaError::BadSubject("inputs and emissions are bits 0 or 1".into()));
            }
            groups.entry((e.from, e.on_input)).or_default().push(e);
        }
        let mut table = Vec::with_capacity(spec.states);
        for s in 0..spec.states {
            let mut row = Vec::with_capacity(2);
            for input in 0..=1u8 {
                let edges = groups
                    .get(&(s, input))
                    .ok_or(ArenaError::MissingTransition { state: s, input })?;
                row.push(Self::branch(&spec, s, input, edges)?);
            }
            let [a, b]: [Branch; 2] = row.try_into().expect("two inputs");
            table.push([a, b]);
        }
        let subject = Subject { spec, table };
        subject.check_kind()?;
        Ok(subject)
    }

    fn branch(spec: &SubjectSpec, state: usize, input: u8, edges: &[&EdgeSpec]) -> Result<Branch, ArenaError> {
        let bad = |why: &str| ArenaError::BadSubject(format!("state {state}, input {input}: {why}"));
        if let Some(fb) = edges.iter().find(|e| e.freebit_index.is_some()) {
            if edges.len() != 1 {
                return Err(bad("a freebit edge must be the only edge of its group"));
            }
            if fb.emit.is_some() || fb.prob.is_some() {
                return Err(bad("a freebit edge emits the freebit; give no emit or prob"));
            }
            let index = fb.freebit_index.expect("found above");
            if index >= spec.freebit_budget {
                return Err(ArenaError::FreebitOutOfBudget {
                    index,
                    budget: spec.freebit_budget,
                });
            }
            return Ok(Branch::Freebit { index, to: fb.to });
        }
        let emit = |e: &EdgeSpec| e.emit.map(|b| b == 1).ok_or_else(|| bad("edge needs an emit bit"));
        if edges.iter().all(|e| e.prob.is_none()) {
            if edges.len() != 1 {
                return Err(bad("several deterministic edges"));
            }
            return Ok(Branch::Fixed {
                emit: emit(edges[0])?,
                to: edges[0].to,
            });
        }
        if edges.iter().any(|e| e.prob.is_none()) {
            return Err(bad("mixes probabilistic and deterministic edges"));
        }
        let mut out = Vec::with_capacity(edges.len());
        let mut total = BigRational::zero();
        for e in edges {
            let p = e.prob.as_ref().expect("checked").value().clone();
            total += &p;
            out.push((p, emit(e)?, e.to));
        }
        if !total.is_one() {
            return Err(bad(&format!("probabilities sum to {total}")));
        }
        Ok(Branch::Random(out))
    }

    fn check_kind(&self) -> Result<(), ArenaError> {
        let (mut random, mut freebit) = (false, false);
        for row in &self.table {
            for b in row {
                match b {
                    Branch::Fixed { .. } => {}
                    Branch::Random(_) => random = true,
                    Branch::Freebit { .. } => freebit = true,
                }
            }
        }
        let ok = match self.spec.kind {
            SubjectKind::Deterministic => !random && !freebit,
            SubjectKind::Noisy => !freebit,
            SubjectKind::Freebit => true,
            SubjectKind::GerbilHybrid => !random,
        };
        if ok {
            Ok(())
        } else {
            Err(ArenaError::BadSubject(format!(
                "{:?} subject has {}",
                self.spec.kind,
                if freebit { "freebit edges" } else { "probabilistic edges" }
            )))
        }
    }

    /// Checks that within `horizon` steps no path uses a freebit twice.
    pub fn check_depletion(&self, horizon: usize) -> Result<(), ArenaError> {
        let start = SubjectState {
            state: self.spec.initial,
            consumed: 0,
        };
        let mut seen: HashSet<SubjectState> = HashSet::from([start]);
        let mut frontier = VecDeque::from([(start, 0usize)]);
        while let Some((st, depth)) = frontier.pop_front() {
            if depth == horizon {
                continue;
            }
            for input in [false, true] {
                let nexts: Vec<SubjectState> = match &self.table[st.state][usize::from(input)] {
                    Branch::Fixed { to, .. } => vec![SubjectState { state: *to, ..st }],
                    Branch::Random(edges) => edges
                        .iter()
                        .filter(|(p, _, _)| !p.is_zero())
                        .map(|(_, _, to)| SubjectState { state: *to, ..st })
                        .collect(),
                    Branch::Freebit { index, to } => {
                        if st.is_consumed(*index) {
                            return Err(ArenaError::FreebitReused {
                                index: *index,
                                step: depth,
                            });
                        }
                        vec![SubjectState {
                            state: *to,
                            consumed: st.consumed | 1 << index,
                        }]
                    }
                };
                for n in nexts {
                    if seen.insert(n) {
                        frontier.push_back((n, depth + 1));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &SubjectSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn freebit_budget(&self) -> usize {
        self.spec.freebit_budget
    }

    pub fn states(&self) -> usize {
        self.spec.states
    }

    pub fn start(&self) -> SubjectState {
        SubjectState {
            state: self.spec.initial,
            consumed: 0,
        }
    }

    pub fn branch_at(&self, state: usize, input: bool) -> &Branch {
        &self.table[state][usize::from(input)]
    }

    /// One sampled step. Freebit values come from `freebit`.
    pub fn step<R: Rng + ?Sized>(
        &self,
        st: SubjectState,
        input: bool,
        rng: &mut R,
        freebit: impl Fn(usize) -> bool,
    ) -> (bool, SubjectState) {
        match self.branch_at(st.state, input) {
            Branch::Fixed { emit, to } => (*emit, SubjectState { state: *to, ..st }),
            Branch::Random(edges) => {
                let x: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = edges.last().expect("nonempty group");
                for e in edges {
                    acc += e.0.to_f64().unwrap_or(0.0);
                    if x < acc {
                        pick = e;
                        break;
                    }
                }
                (pick.1, SubjectState { state: pick.2, ..st })
            }
            Branch::Freebit { index, to } => (
                freebit(*index),
                SubjectState {
                    state: *to,
                    consumed: st.consumed | 1 << index,
                },
            ),
        }
    }

    /// Exact distribution of the behaviors emitted on `inputs`, starting
    /// from `start`, with every freebit fixed by `assignment`.
    pub fn true_distribution_from(
        &self,
        start: SubjectState,
        inputs: &[bool],
        assignment: &[bool],
    ) -> Result<Distribution, ArenaError> {
        if inputs.len() > MAX_HORIZON {
            return Err(ArenaError::HorizonTooLong {
                horizon: inputs.len(),
                limit: MAX_HORIZON,
            });
        }
        if assignment.len() < self.spec.freebit_budget {
            return Err(ArenaError::BadAssignment {
                got: assignment.len(),
                budget: self.spec.freebit_budget,
            });
        }
        let mut layer: BTreeMap<(BitString, SubjectState), BigRational> =
            BTreeMap::from([((BitString::new(), start), BigRational::one())]);
        for &input in inputs {
            let mut next: BTreeMap<(BitString, SubjectState), BigRational> = BTreeMap::new();
            for ((out, st), p) in layer {
                let mut push = |emit: bool, to: SubjectState, q: BigRational| {
                    *next.entry((out.with(emit), to)).or_insert_with(BigRational::zero) += q;
                };
                match self.branch_at(st.state, input) {
                    Branch::Fixed { emit, to } => push(*emit, SubjectState { state: *to, ..st }, p),
                    Branch::Random(edges) => {
                        for (q, emit, to) in edges {
                            if !q.is_zero() {
                                push(*emit, SubjectState { state: *to, ..st }, &p * q);
                            }
                        }
                    }
                    Branch::Freebit { index, to } => push(
                        assignment[*index],
                        SubjectState {
                            state: *to,
                            consumed: st.consumed | 1 << index,
                        },
                        p,
                    ),
                }
            }
            layer = next;
        }
        let mut dist = Distribution::new();
        for ((out, _), p) in layer {
            *dist.entry(out).or_insert_with(BigRational::zero) += p;
        }
        Ok(dist)
    }

    /// Exact distribution of the behaviors at times `t..u`, running from the
    /// initial state on `inputs[0..u]` and marginalizing earlier randomness.
    pub fn true_distribution(
        &self,
        inputs: &BitString,
        t: usize,
        u: usize,
        assignment: &[bool],
    ) -> Result<Distribution, ArenaError> {
        if t > u || u > inputs.len() {
            return Err(ArenaError::BadConfig(format!(
                "window {t}..{u} does not fit {} inputs",
                inputs.len()
            )));
        }
        if u > MAX_HORIZON {
            return Err(ArenaError::HorizonTooLong {
                horizon: u,
                limit: MAX_HORIZON,
            });
        }
        let full = self.true_distribution_from(self.start(), &inputs.bits()[..u], assignment)?;
        let mut dist = Distribution::new();
        for (out, p) in full {
            let tail = BitString::from(&out.bits()[t..]);
            *dist.entry(tail).or_insert_with(BigRational::zero) += p;
        }
        Ok(dist)
    }

    /// Freebit indices that some edge can consume.
    pub fn freebit_indices(&self) -> BTreeSet<usize> {
        self.table
            .iter()
            .flatten()
            .filter_map(|b| match b {
                Branch::Freebit { index, .. } => Some(*index),
                _ => None,
            })
            .collect()
    }
}

/// Ready-made subjects.
pub mod catalog {
    use super::*;

    fn spec(name: &str, kind: SubjectKind, states: usize, edges: Vec<EdgeSpec>, budget: usize) -> SubjectSpec {
        SubjectSpec {
            name: name.to_string(),
            kind,
            states,
            initial: 0,
            edges,
            freebit_budget: budget,
        }
    }

    /// Emits the previous input (0 at the first step).
    pub fn parrot() -> SubjectSpec {
        let mut edges = Vec::new();
        for s in 0..2u8 {
            for i in 0..2u8 {
                edges.push(EdgeSpec::fixed(s.into(), i, i.into(), s));
            }
        }
        spec("parrot", SubjectKind::Deterministic, 2, edges, 0)
    }

    /// Emits the complement of the current input.
    pub fn inverter() -> SubjectSpec {
        let edges = (0..2u8).map(|i| EdgeSpec::fixed(0, i, 0, 1 - i)).collect();
        spec("inverter", SubjectKind::Deterministic, 1, edges, 0)
    }

    /// Emits the XOR of the current and previous inputs.
    pub fn xor_pair() -> SubjectSpec {
        let mut edges = Vec::new();
        for s in 0..2u8 {
            for i in 0..2u8 {
                edges.push(EdgeSpec::fixed(s.into(), i, i.into(), s ^ i));
            }
        }
        spec("xor-pair", SubjectKind::Deterministic, 2, edges, 0)
    }

    /// Emits a fair coin flip every step.
    pub fn noisy_coin() -> SubjectSpec {
        let half = Probability::ratio(1, 2);
        let mut edges = Vec::new();
        for i in 0..2u8 {
            for b in 0..2u8 {
                edges.push(EdgeSpec::random(0, i, 0, b, half.clone()));
            }
        }
        spec("noisy-coin", SubjectKind::Noisy, 1, edges, 0)
    }

    /// Emits the previous input with probability `keep`, its complement
    /// otherwise.
    pub fn noisy_parrot(keep: Probability) -> SubjectSpec {
        let flip = Probability::new(BigRational::one() - keep.value()).expect("complement in range");
        let mut edges = Vec::new();
        for s in 0..2u8 {
            for i in 0..2u8 {
                edges.push(EdgeSpec::random(s.into(), i, i.into(), s, keep.clone()));
                edges.push(EdgeSpec::random(s.into(), i, i.into(), 1 - s, flip.clone()));
            }
        }
        spec("noisy-parrot", SubjectKind::Noisy, 2, edges, 0)
    }

    /// Echoes its input for `delay` steps, then emits freebit 0 once, then
    /// echoes forever.
    pub fn freebit_chain(delay: usize) -> SubjectSpec {
        let mut edges = Vec::new();
        for s in 0..delay {
            for i in 0..2u8 {
                edges.push(EdgeSpec::fixed(s, i, s + 1, i));
            }
        }
        for i in 0..2u8 {
            edges.push(EdgeSpec::freebit(delay, i, delay + 1, 0));
            edges.push(EdgeSpec::fixed(delay + 1, i, delay + 1, i));
        }
        spec(&format!("freebit-chain-{delay}"), SubjectKind::Freebit, delay + 2, edges, 1)
    }

    /// Looks up a subject by name: `parrot`, `inverter`, `xor-pair`,
    /// `noisy-coin`, `noisy-parrot` (keeps with probability 3/4),
    /// `gerbil-hybrid`, or `freebit-chain-<delay>`.
    pub fn by_name(name: &str) -> Option<SubjectSpec> {
        match name {
            "parrot" => Some(parrot()),
            "inverter" => Some(inverter()),
            "xor-pair" => Some(xor_pair()),
            "noisy-coin" => Some(noisy_coin()),
            "noisy-parrot" => Some(noisy_parrot(Probability::ratio(3, 4))),
            "gerbil-hybrid" => Some(gerbil_hybrid()),
            _ => name
                .strip_prefix("freebit-chain-")
                .and_then(|d| d.parse().ok())
                .map(freebit_chain),
        }
    }

    /// Deterministic except for a single freebit tiebreak at step 2:
    /// step 0 echoes, step 1 inverts, step 2 emits freebit 0, then echoes.
    pub fn gerbil_hybrid() -> SubjectSpec {
        let mut edges = Vec::new();
        for i in 0..2u8 {
            edges.push(EdgeSpec::fixed(0, i, 1, i));
            edges.push(EdgeSpec::fixed(1, i, 2, 1 - i));
            edges.push(EdgeSpec::freebit(2, i, 3, 0));
            edges.push(EdgeSpec::fixed(3, i, 3, i));
        }
        spec("gerbil-hybrid", SubjectKind::GerbilHybrid, 4, edges, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn probability_parsing() {
        assert_eq!("3/4".parse::<Probability>().unwrap().value(), &r(3, 4));
        assert_eq!("0.1".parse::<Probability>().unwrap().value(), &r(1, 10));
        assert_eq!(serde_json::from_str::<Probability>("0.25").unwrap().value(), &r(1, 4));
        assert_eq!(serde_json::to_string(&Probability::ratio(1, 2)).unwrap(), "\"1/2\"");
        assert!("5/4".parse::<Probability>().is_err());
        assert!("-0.5".parse::<Probability>().is_err());
        assert!("1/0".parse::<Probability>().is_err());
        assert!("x".parse::<Probability>().is_err());
    }

    #[test]
    fn parrot_is_a_point_mass_on_shifted_input() {
        let s = Subject::new(catalog::parrot()).unwrap();
        let inputs = bs("101101");
        let d = s.true_distribution(&inputs, 0, 6, &[]).unwrap();
        assert_eq!(d, Distribution::from([(bs("010110"), BigRational::one())]));
        let d = s.true_distribution(&inputs, 2, 5, &[]).unwrap();
        assert_eq!(d, Distribution::from([(bs("011"), BigRational::one())]));
    }

    #[test]
    fn noisy_coin_is_uniform() {
        let s = Subject::new(catalog::noisy_coin()).unwrap();
        let d = s.true_distribution(&bs("0000000"), 4, 7, &[]).unwrap();
        assert_eq!(d.len(), 8);
        assert!(d.values().all(|p| *p == r(1, 8)));
    }

    #[test]
    fn gerbil_hybrid_hand_trace() {
        let s = Subject::new(catalog::gerbil_hybrid()).unwrap();
        // inputs 1 1 0 0: echo 1, invert 1 -> 0, freebit 1, echo 0
        let d = s.true_distribution(&bs("1100"), 0, 4, &[true]).unwrap();
        assert_eq!(d, Distribution::from([(bs("1010"), BigRational::one())]));
        let d = s.true_distribution(&bs("1100"), 0, 4, &[false]).unwrap();
        assert_eq!(d, Distribution::from([(bs("1000"), BigRational::one())]));
    }

    #[test]
    fn horizon_guard() {
        let s = Subject::new(catalog::noisy_coin()).unwrap();
        let inputs = BitString::from_bits(vec![false; 21]);
        assert_eq!(
            s.true_distribution(&inputs, 0, 21, &[]),
            Err(ArenaError::HorizonTooLong { horizon: 21, limit: 20 })
        );
    }

    #[test]
    fn validation_errors() {
        let mut spec = catalog::parrot();
        spec.edges.pop();
        assert_eq!(Subject::new(spec), Err(ArenaError::MissingTransition { state: 1, input: 1 }));

        let mut spec = catalog::noisy_coin();
        spec.edges[0].prob = Some(Probability::ratio(1, 3));
        assert!(matches!(Subject::new(spec), Err(ArenaError::BadSubject(_))));

        let mut spec = catalog::freebit_chain(1);
        spec.freebit_budget = 0;
        assert_eq!(Subject::new(spec), Err(ArenaError::FreebitOutOfBudget { index: 0, budget: 0 }));

        let mut spec = catalog::noisy_coin();
        spec.kind = SubjectKind::Deterministic;
        assert!(matches!(Subject::new(spec), Err(ArenaError::BadSubject(_))));
    }

    #[test]
    fn depletion_is_checked_along_paths() {
        let chain = Subject::new(catalog::freebit_chain(3)).unwrap();
        assert!(chain.check_depletion(50).is_ok());
        // a loop through a freebit edge spends the same freebit twice
        let mut spec = catalog::gerbil_hybrid();
        for e in &mut spec.edges {
            if e.from == 3 {
                e.to = 2;
            }
        }
        let looping = Subject::new(spec).unwrap();
        assert!(looping.check_depletion(3).is_ok());
        assert_eq!(looping.check_depletion(5), Err(ArenaError::FreebitReused { index: 0, step: 4 }));
    }

    #[test]
    fn catalog_names_round_trip() {
        for name in ["parrot", "inverter", "xor-pair", "noisy-coin", "noisy-parrot", "gerbil-hybrid", "freebit-chain-7"] {
            let spec = catalog::by_name(name).unwrap();
            assert_eq!(spec.name, name);
            assert!(Subject::new(spec).is_ok());
        }
        assert!(catalog::by_name("freebit-chain-x").is_none());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = catalog::noisy_parrot(Probability::ratio(3, 4));
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"prob\":\"3/4\""));
        let back: SubjectSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let strict = r#"{"kind":"deterministic","states":1,"edges":[],"colour":1}"#;
        assert!(serde_json::from_str::<SubjectSpec>(strict).is_err());
    }
}
