//! A truncated universal-prior predictor over toyvm-1 programs.
//!
//! Every program `P` with `|P| <= L` is a hypothesis with prior weight
//! `2^-|P| / C`, where `C` is the Kraft sum of the enumerated programs. Since
//! `RAND` emits the bit it reads, the probability that `P` outputs a given
//! string `h` is either 0 or `2^-r`, where `r` is the number of `RAND`s
//! executed while producing `h`. All masses below are therefore exact dyadic
//! rationals; floating point only appears in reported ratios.
//!
//! Hypotheses that stop before emitting the next bit abstain: they put no
//! mass on either continuation and are excluded from next-bit predictions.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitString;
use crate::dyadic::{Dyadic, MAX_EXPONENT};
use crate::toyvm::{self, ExecState, MachineConfig, Next, Program, VmError, MACHINE_VERSION};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PriorError {
    #[error(transparent)]
    Vm(#[from] VmError),
    #[error("the truncated mixture gives zero mass to both continuations at step {step}")]
    ZeroMassHistory { step: usize },
    #[error("the sequence has zero probability under the comparison hypothesis at step {step}")]
    UnsupportedSequence { step: usize },
    #[error("program {0} is not a hypothesis of this mixture")]
    NotInMixture(String),
    #[error("program length bound {bound} plus rand budget {rand_budget} exceeds exact-arithmetic range")]
    TooFine { bound: usize, rand_budget: usize },
}

#[derive(Clone, Debug)]
struct Hypothesis {
    program: Program,
    state: ExecState,
    alive: bool,
}

impl Hypothesis {
    fn new(program: Program) -> Self {
        Hypothesis {
            program,
            state: ExecState::new(),
            alive: true,
        }
    }

    /// `2^-|P| * D_P(history)`, unnormalized.
    fn mass(&self) -> Dyadic {
        if self.alive {
            Dyadic::pow2_neg((self.program.len() + self.state.rands()) as u32)
        } else {
            Dyadic::ZERO
        }
    }

    /// Masses this hypothesis puts on the two one-bit continuations.
    fn next_masses(&self, cfg: &MachineConfig) -> (Dyadic, Dyadic) {
        if !self.alive {
            return (Dyadic::ZERO, Dyadic::ZERO);
        }
        let mut peek = self.state;
        match peek.advance(&self.program, cfg) {
            Next::Bit(false) => (self.mass(), Dyadic::ZERO),
            Next::Bit(true) => (Dyadic::ZERO, self.mass()),
            Next::Rand => (self.mass().half(), self.mass().half()),
            Next::Stop(_) => (Dyadic::ZERO, Dyadic::ZERO),
        }
    }

    /// `D_P(h b) / D_P(h)`.
    fn conditional(&self, bit: bool, cfg: &MachineConfig) -> f64 {
        if !self.alive {
            return 0.0;
        }
        let mut peek = self.state;
        match peek.advance(&self.program, cfg) {
            Next::Bit(b) if b == bit => 1.0,
            Next::Rand => 0.5,
            _ => 0.0,
        }
    }

    fn observe(&mut self, bit: bool, cfg: &MachineConfig) {
        if !self.alive {
            return;
        }
        match self.state.advance(&self.program, cfg) {
            Next::Bit(b) if b == bit => {}
            Next::Rand => self.state.resolve_rand(&self.program, bit),
            _ => self.alive = false,
        }
    }
}

/// Exponent `r` with `D_P(seq) = 2^-r`, or `None` when `P` cannot produce
/// `seq` as an output prefix.
pub fn likelihood_exponent(program: &Program, seq: &BitString, cfg: &MachineConfig) -> Option<u32> {
    let mut h = Hypothesis::new(program.clone());
    for &b in seq.bits() {
        h.observe(b, cfg);
        if !h.alive {
            return None;
        }
    }
    Some(h.state.rands() as u32)
}

/// `D_P(seq)` as an exact dyadic.
pub fn likelihood(program: &Program, seq: &BitString, cfg: &MachineConfig) -> Dyadic {
    likelihood_exponent(program, seq, cfg).map_or(Dyadic::ZERO, Dyadic::pow2_neg)
}

/// Bayesian mixture over all programs up to a length bound. Values are
/// immutable: [`Mixture::update`] returns the conditioned mixture.
#[derive(Clone, Debug)]
pub struct Mixture {
    hypotheses: Vec<Hypothesis>,
    normalizer: Dyadic,
    history: BitString,
    cfg: MachineConfig,
    bound: usize,
}

pub fn build_mixture(bound: usize, cfg: &MachineConfig) -> Result<Mixture, PriorError> {
    cfg.validate()?;
    if bound + cfg.rand_budget + 1 > MAX_EXPONENT as usize {
        return Err(PriorError::TooFine {
            bound,
            rand_budget: cfg.rand_budget,
        });
    }
    let programs = toyvm::enumerate(bound)?;
    let normalizer = toyvm::kraft_sum(&programs);
    Ok(Mixture {
        hypotheses: programs.into_iter().map(Hypothesis::new).collect(),
        normalizer,
        history: BitString::new(),
        cfg: *cfg,
        bound,
    })
}

/// One row of a mixture snapshot.
#[derive(Clone, Debug, Serialize)]
pub struct WeightEntry {
    pub program: Program,
    pub asm: String,
    pub prior: f64,
    pub posterior: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixtureSnapshot {
    pub machine: &'static str,
    pub bound: usize,
    pub config: MachineConfig,
    pub normalizer: Dyadic,
    pub history: BitString,
    pub hypotheses: Vec<WeightEntry>,
}

impl Mixture {
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn config(&self) -> &MachineConfig {
        &self.cfg
    }

    pub fn history(&self) -> &BitString {
        &self.history
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    /// The Kraft normalizer `C`.
    pub fn normalizer(&self) -> Dyadic {
        self.normalizer
    }

    pub fn programs(&self) -> impl Iterator<Item = &Program> {
        self.hypotheses.iter().map(|h| &h.program)
    }

    pub fn contains(&self, program: &Program) -> bool {
        self.position(program).is_some()
    }

    fn position(&self, program: &Program) -> Option<usize> {
        // programs are stored in shortlex order
        self.hypotheses
            .binary_search_by(|h| h.program.code().cmp(program.code()))
            .ok()
    }

    /// The same hypotheses with an empty history.
    pub fn reset(&self) -> Mixture {
        Mixture {
            hypotheses: self.hypotheses.iter().map(|h| Hypothesis::new(h.program.clone())).collect(),
            normalizer: self.normalizer,
            history: BitString::new(),
            cfg: self.cfg,
            bound: self.bound,
        }
    }

    pub fn prior_weight(&self, program: &Program) -> Option<f64> {
        self.position(program)
            .map(|_| Dyadic::pow2_neg(program.len() as u32).to_f64() / self.normalizer.to_f64())
    }

    /// Unnormalized mass `C * Pr_U[history]`.
    pub fn history_mass(&self) -> Dyadic {
        self.hypotheses.iter().map(Hypothesis::mass).sum()
    }

    /// `Pr_U[history]`.
    pub fn history_probability(&self) -> f64 {
        self.history_mass().to_f64() / self.normalizer.to_f64()
    }

    /// Unnormalized masses `C * Pr_U[history 0]` and `C * Pr_U[history 1]`.
    pub fn continuation_masses(&self) -> (Dyadic, Dyadic) {
        self.hypotheses.iter().fold((Dyadic::ZERO, Dyadic::ZERO), |(a, b), h| {
            let (m0, m1) = h.next_masses(&self.cfg);
            (a + m0, b + m1)
        })
    }

    /// Probability that the next bit is 1, given the history.
    pub fn predict_next(&self) -> Result<f64, PriorError> {
        let (m0, m1) = self.continuation_masses();
        ratio(m1, m0 + m1).ok_or(PriorError::ZeroMassHistory {
            step: self.history.len(),
        })
    }

    pub fn update(&self, bit: bool) -> Mixture {
        let mut next = self.clone();
        next.observe(bit);
        next
    }

    /// In-place form of [`Mixture::update`].
    pub fn observe(&mut self, bit: bool) {
        for h in &mut self.hypotheses {
            h.observe(bit, &self.cfg);
        }
        self.history.push(bit);
    }

    /// Posterior weights in hypothesis order; all zero if the history has
    /// no mass.
    pub fn posterior_weights(&self) -> Vec<f64> {
        let total = self.history_mass();
        self.hypotheses
            .iter()
            .map(|h| ratio(h.mass(), total).unwrap_or(0.0))
            .collect()
    }

    pub fn snapshot(&self) -> MixtureSnapshot {
        let c = self.normalizer.to_f64();
        let posterior = self.posterior_weights();
        MixtureSnapshot {
            machine: MACHINE_VERSION,
            bound: self.bound,
            config: self.cfg,
            normalizer: self.normalizer,
            history: self.history.clone(),
            hypotheses: self
                .hypotheses
                .iter()
                .zip(posterior)
                .map(|(h, posterior)| WeightEntry {
                    program: h.program.clone(),
                    asm: h.program.asm(),
                    prior: Dyadic::pow2_neg(h.program.len() as u32).to_f64() / c,
                    posterior,
                })
                .collect(),
        }
    }

    /// `Pr_U[seq]` computed from scratch, independent of the history.
    pub fn sequence_probability(&self, seq: &BitString) -> f64 {
        let mass: Dyadic = self
            .hypotheses
            .iter()
            .filter_map(|h| {
                likelihood_exponent(&h.program, seq, &self.cfg)
                    .map(|r| Dyadic::pow2_neg((h.program.len() as u32) + r))
            })
            .sum();
        mass.to_f64() / self.normalizer.to_f64()
    }
}

fn ratio(num: Dyadic, den: Dyadic) -> Option<f64> {
    if den == Dyadic::ZERO {
        return None;
    }
    // rescale both by the larger exponent so the quotient is taken between
    // comparably sized floats
    let e = num.exponent().max(den.exponent());
    let n = num.numerator() << (e - num.exponent());
    let d = den.numerator() << (e - den.exponent());
    Some(n as f64 / d as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegretStep {
    pub step: usize,
    pub bit: bool,
    pub p_u: f64,
    pub p_q: f64,
    pub ratio: f64,
    pub cum_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MistakeCount {
    pub eps: f64,
    pub mistakes: usize,
    /// `sum log2 max(r, 1)` over the steps that were not mistakes.
    pub realized_offset: f64,
    /// `(|Q| + log2 C + realized_offset) / log2(1 / (1 - eps))`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegretReport {
    pub machine: &'static str,
    pub bound_len: usize,
    pub program: Program,
    pub program_len: usize,
    pub sequence: BitString,
    pub steps: Vec<RegretStep>,
    pub ratio_product: f64,
    /// `2^-|Q|`, the guaranteed lower bound on `ratio_product`.
    pub dominance_floor: f64,
    pub mistakes: Vec<MistakeCount>,
}

impl RegretReport {
    pub fn per_step_ratios(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.ratio).collect()
    }

    pub fn mistake_count(&self, eps: f64) -> Option<usize> {
        self.mistakes.iter().find(|m| m.eps == eps).map(|m| m.mistakes)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,bit,p_U,p_Q,ratio,cum_ratio\n");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.step,
                u8::from(s.bit),
                s.p_u,
                s.p_q,
                s.ratio,
                s.cum_ratio
            );
        }
        out
    }
}

/// Compares the mixture (from an empty history) with hypothesis `q` along
/// `sequence`.
pub fn regret_report(
    q: &Program,
    sequence: &BitString,
    mixture: &Mixture,
    eps_list: &[f64],
) -> Result<RegretReport, PriorError> {
    let index = mixture
        .position(q)
        .ok_or_else(|| PriorError::NotInMixture(q.to_string()))?;
    let mut m = mixture.reset();
    let mut steps = Vec::with_capacity(sequence.len());
    let mut cum = 1.0;
    for (step, &bit) in sequence.bits().iter().enumerate() {
        let p_q = m.hypotheses[index].conditional(bit, &m.cfg);
        if p_q == 0.0 {
            return Err(PriorError::UnsupportedSequence { step });
        }
        let p1 = m.predict_next()?;
        let p_u = if bit { p1 } else { 1.0 - p1 };
        let r = p_u / p_q;
        cum *= r;
        steps.push(RegretStep {
            step,
            bit,
            p_u,
            p_q,
            ratio: r,
            cum_ratio: cum,
        });
        m.observe(bit);
    }
    let log2_c = m.normalizer.to_f64().log2();
    let mistakes = eps_list
        .iter()
        .map(|&eps| {
            let threshold = 1.0 - eps;
            let (bad, good): (Vec<_>, Vec<_>) = steps.iter().partition(|s| s.ratio < threshold);
            let realized_offset: f64 = good.iter().map(|s| s.ratio.max(1.0).log2()).sum();
            MistakeCount {
                eps,
                mistakes: bad.len(),
                realized_offset,
                bound: (q.len() as f64 + log2_c + realized_offset) / (1.0 / threshold).log2(),
            }
        })
        .collect();
    Ok(RegretReport {
        machine: MACHINE_VERSION,
        bound_len: mixture.bound,
        program: q.clone(),
        program_len: q.len(),
        sequence: sequence.clone(),
        steps,
        ratio_product: cum,
        dominance_floor: Dyadic::pow2_neg(q.len() as u32).to_f64(),
        mistakes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalStep {
    pub step: usize,
    pub bit: bool,
    /// Probability the mixture assigned to the realized bit.
    pub p_realized: f64,
    /// `Pr_U` of the prefix ending with this bit.
    pub cumulative: f64,
}

/// Generates `n` bits, each chosen as the continuation the mixture finds
/// less likely (ties go to 1).
pub fn diagonal_sequence(mixture: &Mixture, n: usize) -> Result<(BitString, Vec<DiagonalStep>), PriorError> {
    let mut m = mixture.reset();
    let mut steps = Vec::with_capacity(n);
    for step in 0..n {
        let (m0, m1) = m.continuation_masses();
        let total = m0 + m1;
        if total == Dyadic::ZERO {
            return Err(PriorError::ZeroMassHistory { step });
        }
        let bit = m1 <= m0;
        let chosen = if bit { m1 } else { m0 };
        m.observe(bit);
        steps.push(DiagonalStep {
            step,
            bit,
            p_realized: ratio(chosen, total).expect("nonzero total"),
            cumulative: m.history_probability(),
        });
    }
    Ok((m.history.clone(), steps))
}

/// `sum 2^-|P| * Pr[P halts]` over programs with `|P| <= bound`.
pub fn omega_truncated(bound: usize, cfg: &MachineConfig) -> Result<Dyadic, PriorError> {
    cfg.validate()?;
    if bound + cfg.rand_budget > MAX_EXPONENT as usize {
        return Err(PriorError::TooFine {
            bound,
            rand_budget: cfg.rand_budget,
        });
    }
    Ok(toyvm::enumerate(bound)?
        .iter()
        .map(|p| {
            let halt = toyvm::halting_probability(p, cfg);
            Dyadic::new(halt.numerator(), halt.exponent() + p.len() as u32)
        })
        .sum())
}
