//! toyvm-1: a total, budgeted, prefix-free bit-emitting machine.
//!
//! Opcode table (3 bits each, most significant bit first):
//!
//! | code | mnemonic | effect                                                        |
//! |------|----------|---------------------------------------------------------------|
//! | 000  | EMIT0    | output 0                                                      |
//! | 001  | EMIT1    | output 1                                                      |
//! | 010  | RAND     | read the next random bit r, output r, add r to the counter    |
//! | 011  | INC      | counter += 1 (mod 16)                                         |
//! | 100  | DEC      | counter -= 1 (mod 16)                                         |
//! | 101  | JMPZ     | if counter == 0, skip the next instruction                    |
//! | 110  | JMP      | jump back to the first instruction                            |
//! | 111  | HALT     | output the rest of the body verbatim, then halt               |
//!
//! Running past the last instruction halts. The counter starts at 0, so the
//! empty program halts immediately with empty output. Every executed
//! instruction costs one step; `HALT` payload bits cost no steps. A run stops
//! without halting as soon as an instruction would exceed one of the budgets.

mod exec;
mod program;

use std::collections::BTreeMap;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{gamma, BitString};
use crate::dyadic::Dyadic;

pub use exec::{ExecState, Next, Stop, COUNTER_MODULUS};
pub use program::{AsmError, DecodeError, Op, Program, OPCODE_WIDTH};

/// Version string embedded in every report that depends on the machine.
pub const MACHINE_VERSION: &str = "toyvm-1";

/// Default ceiling on `max_len` for exhaustive enumeration.
pub const DEFAULT_LENGTH_GUARD: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VmError {
    #[error("enumeration bound {requested} exceeds the guard {guard}")]
    LimitExceeded { requested: usize, guard: usize },
    #[error("invalid machine config: {0}")]
    BadConfig(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MachineConfig {
    pub step_budget: usize,
    pub rand_budget: usize,
    pub output_budget: usize,
}

impl Default for MachineConfig {
    fn default() -> Self {
        MachineConfig {
            step_budget: 256,
            rand_budget: 16,
            output_budget: 32,
        }
    }
}

impl MachineConfig {
    pub fn new(step_budget: usize, rand_budget: usize, output_budget: usize) -> Result<Self, VmError> {
        let cfg = MachineConfig {
            step_budget,
            rand_budget,
            output_budget,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), VmError> {
        if self.step_budget == 0 {
            return Err(VmError::BadConfig("step_budget must be at least 1"));
        }
        if self.output_budget == 0 {
            return Err(VmError::BadConfig("output_budget must be at least 1"));
        }
        if self.rand_budget > 100 {
            return Err(VmError::BadConfig("rand_budget above 100 is not supported"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunResult {
    pub output: BitString,
    pub halted: bool,
    pub stop: Stop,
    pub steps_used: usize,
    pub rands_used: usize,
}

/// Runs `program` to completion, reading random bits from `rand_stream`.
/// A `RAND` beyond the end of the stream behaves like an exhausted random
/// budget.
pub fn run(program: &Program, cfg: &MachineConfig, rand_stream: &[bool]) -> RunResult {
    let limited = MachineConfig {
        rand_budget: cfg.rand_budget.min(rand_stream.len()),
        ..*cfg
    };
    let mut state = ExecState::new();
    let mut output = BitString::new();
    let stop = loop {
        match state.advance(program, &limited) {
            Next::Bit(b) => output.push(b),
            Next::Rand => {
                let b = rand_stream[state.rands()];
                state.resolve_rand(program, b);
                output.push(b);
            }
            Next::Stop(why) => break why,
        }
    };
    RunResult {
        output,
        halted: stop == Stop::Halted,
        stop,
        steps_used: state.steps(),
        rands_used: state.rands(),
    }
}

/// Runs a program that contains no `RAND` instruction.
pub fn run_deterministic(program: &Program, cfg: &MachineConfig) -> RunResult {
    run(program, cfg, &[])
}

/// Total length of a program whose body has `body_len` bits.
pub fn program_len(body_len: usize) -> usize {
    gamma::encoded_len(body_len as u64 + 1) + body_len
}

/// All valid programs with `|P| <= max_len`, shortest first, then
/// lexicographic. Fails if `max_len` exceeds [`DEFAULT_LENGTH_GUARD`].
pub fn enumerate(max_len: usize) -> Result<Vec<Program>, VmError> {
    enumerate_guarded(max_len, DEFAULT_LENGTH_GUARD)
}

pub fn enumerate_guarded(max_len: usize, guard: usize) -> Result<Vec<Program>, VmError> {
    if max_len > guard {
        return Err(VmError::LimitExceeded {
            requested: max_len,
            guard,
        });
    }
    let mut out = Vec::new();
    // Total length is strictly increasing in the body length, so iterating
    // body lengths in order and bodies lexicographically is shortlex order.
    for body_len in 0.. {
        if program_len(body_len) > max_len {
            break;
        }
        let header = gamma::encode(body_len as u64 + 1);
        for body in BitString::all_of_length(body_len) {
            let code = header.concat(&body);
            out.push(Program::decode(&code).expect("enumerated program decodes"));
        }
    }
    Ok(out)
}

/// `sum 2^-|P|` over the given programs.
pub fn kraft_sum<'a>(programs: impl IntoIterator<Item = &'a Program>) -> Dyadic {
    programs
        .into_iter()
        .map(|p| Dyadic::pow2_neg(p.len() as u32))
        .sum()
}

/// Exact distribution of the first `n` output bits, with the mass of runs
/// that stop before producing `n` bits collected in `abstain`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputDistribution {
    pub n: usize,
    pub probs: BTreeMap<BitString, f64>,
    pub abstain: f64,
}

impl OutputDistribution {
    pub fn prob(&self, prefix: &BitString) -> f64 {
        self.probs.get(prefix).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum::<f64>() + self.abstain
    }
}

pub fn output_distribution(program: &Program, n: usize, cfg: &MachineConfig) -> OutputDistribution {
    let mut probs = BTreeMap::new();
    let mut abstain = 0.0;
    let mut stack = vec![(ExecState::new(), BitString::new(), 1.0f64)];
    while let Some((mut state, mut out, weight)) = stack.pop() {
        loop {
            if out.len() == n {
                *probs.entry(out).or_insert(0.0) += weight;
                break;
            }
            match state.advance(program, cfg) {
                Next::Bit(b) => out.push(b),
                Next::Rand => {
                    let mut one = state;
                    one.resolve_rand(program, true);
                    stack.push((one, out.with(true), weight / 2.0));
                    state.resolve_rand(program, false);
                    out.push(false);
                    // weight is split between the two branches
                    let half = weight / 2.0;
                    stack.push((state, out, half));
                    break;
                }
                Next::Stop(_) => {
                    abstain += weight;
                    break;
                }
            }
        }
    }
    OutputDistribution { n, probs, abstain }
}

/// Probability, over the random stream, that `program` halts within the
/// budgets.
pub fn halting_probability(program: &Program, cfg: &MachineConfig) -> Dyadic {
    fn go(
        program: &Program,
        cfg: &MachineConfig,
        mut state: ExecState,
        memo: &mut HashMap<ExecState, Dyadic>,
    ) -> Dyadic {
        let start = state;
        if let Some(&p) = memo.get(&start) {
            return p;
        }
        let p = loop {
            match state.advance(program, cfg) {
                Next::Bit(_) => {}
                Next::Stop(Stop::Halted) => break Dyadic::ONE,
                Next::Stop(_) => break Dyadic::ZERO,
                Next::Rand => {
                    let mut one = state;
                    one.resolve_rand(program, true);
                    state.resolve_rand(program, false);
                    let p1 = go(program, cfg, one, memo);
                    let p0 = go(program, cfg, state, memo);
                    break (p0 + p1).half();
                }
            }
        };
        memo.insert(start, p);
        p
    }
    go(program, cfg, ExecState::new(), &mut HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn asm(src: &str) -> Program {
        Program::from_asm(src).unwrap()
    }

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn cfg() -> MachineConfig {
        MachineConfig::default()
    }

    #[test]
    fn straight_line_programs() {
        let r = run(&asm("EMIT1 EMIT1 HALT"), &cfg(), &[]);
        assert_eq!(r.output, bs("11"));
        assert!(r.halted);
        assert_eq!(r.steps_used, 3);

        let r = run(&asm("RAND HALT"), &cfg(), &[false; 16]);
        assert_eq!(r.output, bs("0"));
        assert!(r.halted);
        assert_eq!(r.rands_used, 1);

        let r = run(&Program::decode(&bs("1")).unwrap(), &cfg(), &[]);
        assert_eq!(r.output, BitString::new());
        assert!(r.halted);
        assert_eq!(r.steps_used, 0);
    }

    #[test]
    fn halt_payload_is_literal_output() {
        let r = run(&asm("EMIT0 HALT:1101"), &cfg(), &[]);
        assert_eq!(r.output, bs("01101"));
        assert!(r.halted);
    }

    #[test]
    fn counter_loop_emits_sixteen_zeros() {
        let r = run(&asm("EMIT0 INC JMPZ JMP"), &cfg(), &[]);
        assert_eq!(r.output, BitString::from_bits(vec![false; 16]));
        assert!(r.halted);
        // 16 passes of 4 steps, except the last skips its JMP
        assert_eq!(r.steps_used, 63);
    }

    #[test]
    fn budgets_stop_without_halting() {
        let small = MachineConfig::new(5, 2, 3).unwrap();
        let r = run(&asm("EMIT0 JMP"), &MachineConfig::new(50, 2, 3).unwrap(), &[]);
        assert_eq!(r.stop, Stop::OutputBudget);
        assert_eq!(r.output, bs("000"));
        assert!(!r.halted);

        let r = run(&asm("INC JMP"), &small, &[]);
        assert_eq!(r.stop, Stop::StepBudget);
        assert_eq!(r.steps_used, 5);

        let r = run(&asm("RAND JMP"), &small, &[true, false, true]);
        assert_eq!(r.stop, Stop::RandBudget);
        assert_eq!(r.output, bs("10"));

        let r = run(&asm("RAND JMP"), &cfg(), &[true]);
        assert_eq!(r.stop, Stop::RandBudget, "short streams act as a smaller budget");
    }

    #[test]
    fn rand_bit_feeds_the_counter() {
        // RAND RAND JMPZ EMIT1 HALT:0 -> emits r1 r2, then 1 only if r1+r2 != 0, then 0
        let p = asm("RAND RAND JMPZ EMIT1 HALT:0");
        assert_eq!(run(&p, &cfg(), &[false, false]).output, bs("000"));
        assert_eq!(run(&p, &cfg(), &[true, false]).output, bs("1010"));
        assert_eq!(run(&p, &cfg(), &[true, true]).output, bs("1110"));
    }

    #[test]
    fn config_validation() {
        assert!(MachineConfig::new(0, 0, 1).is_err());
        assert!(MachineConfig::new(1, 0, 0).is_err());
        assert!(MachineConfig::new(1, 0, 1).is_ok());
    }

    #[test]
    fn enumerate_length_one_is_the_empty_program() {
        let progs = enumerate(1).unwrap();
        assert_eq!(progs.len(), 1);
        assert_eq!(progs[0].code(), &bs("1"));
    }

    #[test]
    fn enumerate_guard() {
        assert_eq!(
            enumerate(25),
            Err(VmError::LimitExceeded {
                requested: 25,
                guard: 24
            })
        );
        assert!(enumerate_guarded(25, 25).is_ok());
    }

    #[test]
    fn enumerate_matches_parse_all_bitstrings() {
        for k in 0..=14 {
            let mut oracle = Vec::new();
            for len in 0..=k {
                for s in BitString::all_of_length(len) {
                    if Program::decode(&s).is_ok() {
                        oracle.push(s);
                    }
                }
            }
            let got: Vec<BitString> = enumerate(k).unwrap().iter().map(|p| p.code().clone()).collect();
            assert_eq!(got, oracle, "max_len = {k}");
        }
    }

    #[test]
    fn enumeration_is_prefix_free() {
        let progs = enumerate(14).unwrap();
        for a in &progs {
            for b in &progs {
                if a != b {
                    assert!(!a.code().is_prefix_of(b.code()), "{a} prefixes {b}");
                }
            }
        }
    }

    #[test]
    fn kraft_sum_bounded_and_growing_at_realized_lengths() {
        let mut prev = Dyadic::ZERO;
        for l in 1..=20 {
            let progs = enumerate(l).unwrap();
            let sum = kraft_sum(&progs);
            assert!(sum <= Dyadic::ONE);
            let realized = progs.iter().any(|p| p.len() == l);
            if realized {
                assert!(sum > prev, "L = {l}");
            } else {
                assert_eq!(sum, prev, "L = {l}");
            }
            prev = sum;
        }
    }

    #[test]
    fn output_distribution_examples() {
        let d = output_distribution(&asm("EMIT0 HALT"), 1, &cfg());
        assert_eq!(d.probs, BTreeMap::from([(bs("0"), 1.0)]));
        assert_eq!(d.abstain, 0.0);

        let d = output_distribution(&asm("RAND HALT"), 1, &cfg());
        assert_eq!(d.probs, BTreeMap::from([(bs("0"), 0.5), (bs("1"), 0.5)]));

        let d = output_distribution(&asm("EMIT1"), 2, &cfg());
        assert!(d.probs.is_empty());
        assert_eq!(d.abstain, 1.0);
    }

    #[test]
    fn two_rand_program_matches_four_stream_brute_force() {
        let p = asm("RAND RAND JMPZ EMIT1 HALT:0");
        for n in 1..=4 {
            let mut oracle: BTreeMap<BitString, f64> = BTreeMap::new();
            let mut abstain = 0.0;
            for stream in BitString::all_of_length(2) {
                let r = run(&p, &cfg(), stream.bits());
                if r.output.len() >= n {
                    *oracle.entry(r.output.prefix(n)).or_insert(0.0) += 0.25;
                } else {
                    abstain += 0.25;
                }
            }
            let d = output_distribution(&p, n, &cfg());
            assert_eq!(d.probs, oracle, "n = {n}");
            assert_eq!(d.abstain, abstain);
        }
    }

    #[test]
    fn halting_probability_examples() {
        assert_eq!(halting_probability(&asm("HALT"), &cfg()), Dyadic::ONE);
        assert_eq!(halting_probability(&asm("EMIT0 JMP"), &cfg()), Dyadic::ZERO);
    }

    #[test]
    fn halting_probability_matches_stream_brute_force() {
        let small = MachineConfig::new(64, 6, 32).unwrap();
        for src in ["RAND DEC JMPZ JMP", "RAND JMPZ JMP HALT", "RAND RAND JMPZ JMP EMIT1", "RAND JMPZ JMP RAND"] {
            let p = asm(src);
            let halting = BitString::all_of_length(small.rand_budget)
                .filter(|s| run(&p, &small, s.bits()).halted)
                .count();
            let oracle = Dyadic::new(halting as u128, small.rand_budget as u32);
            assert_eq!(halting_probability(&p, &small), oracle, "{src}");
        }
    }

    proptest::proptest! {
        #[test]
        fn run_is_deterministic(index in 0usize..2000, stream in proptest::collection::vec(proptest::bool::ANY, 16)) {
            let progs = enumerate(14).unwrap();
            let p = &progs[index % progs.len()];
            let a = run(p, &cfg(), &stream);
            let b = run(p, &cfg(), &stream);
            proptest::prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
            proptest::prop_assert!(a.output.len() <= cfg().output_budget);
            proptest::prop_assert!(a.steps_used <= cfg().step_budget);
        }

        #[test]
        fn distributions_normalize_and_marginalize(index in 0usize..5000, n in 0usize..6) {
            let progs = enumerate(16).unwrap();
            let p = &progs[index % progs.len()];
            let small = MachineConfig::new(64, 8, 12).unwrap();
            let d = output_distribution(p, n, &small);
            proptest::prop_assert!((d.total() - 1.0).abs() < 1e-12);
            proptest::prop_assert!(d.probs.values().all(|&v| v >= 0.0));
            let next = output_distribution(p, n + 1, &small);
            if next.abstain == 0.0 {
                for (prefix, &mass) in &d.probs {
                    let marginal = next.prob(&prefix.with(false)) + next.prob(&prefix.with(true));
                    proptest::prop_assert_eq!(marginal, mass);
                }
            }
        }
    }
}
