use serde::{Deserialize, Serialize};

use super::program::{Op, Program};
use super::MachineConfig;

/// The counter register holds values modulo this constant.
pub const COUNTER_MODULUS: u8 = 16;

/// Why execution stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stop {
    Halted,
    StepBudget,
    RandBudget,
    OutputBudget,
}

/// What the machine does next, as seen from the output tape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Next {
    /// A deterministic output bit.
    Bit(bool),
    /// A `RAND` is pending; settle it with [`ExecState::resolve_rand`].
    Rand,
    Stop(Stop),
}

/// Resumable machine state, detached from the program it runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExecState {
    pc: u16,
    counter: u8,
    steps: u32,
    rands: u32,
    emitted: u32,
    payload_pos: Option<u32>,
    stopped: Option<Stop>,
}

impl ExecState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> usize {
        self.steps as usize
    }

    pub fn rands(&self) -> usize {
        self.rands as usize
    }

    pub fn emitted(&self) -> usize {
        self.emitted as usize
    }

    pub fn counter(&self) -> u8 {
        self.counter
    }

    pub fn stopped(&self) -> Option<Stop> {
        self.stopped
    }

    fn stop(&mut self, why: Stop) -> Next {
        self.stopped = Some(why);
        Next::Stop(why)
    }

    /// Runs silent instructions until the machine is about to produce an
    /// output bit, needs a random bit, or stops. Calling it again while a
    /// `RAND` is pending returns `Next::Rand` without side effects.
    pub fn advance(&mut self, program: &Program, cfg: &MachineConfig) -> Next {
        loop {
            if let Some(why) = self.stopped {
                return Next::Stop(why);
            }
            if let Some(pos) = self.payload_pos {
                let payload = program.payload();
                if pos as usize >= payload.len() {
                    return self.stop(Stop::Halted);
                }
                if self.emitted as usize >= cfg.output_budget {
                    return self.stop(Stop::OutputBudget);
                }
                self.payload_pos = Some(pos + 1);
                self.emitted += 1;
                return Next::Bit(payload.bits()[pos as usize]);
            }
            let Some(&op) = program.ops().get(self.pc as usize) else {
                return self.stop(Stop::Halted);
            };
            if self.steps as usize >= cfg.step_budget {
                return self.stop(Stop::StepBudget);
            }
            match op {
                Op::Emit0 | Op::Emit1 => {
                    if self.emitted as usize >= cfg.output_budget {
                        return self.stop(Stop::OutputBudget);
                    }
                    self.steps += 1;
                    self.pc += 1;
                    self.emitted += 1;
                    return Next::Bit(op == Op::Emit1);
                }
                Op::Rand => {
                    if self.emitted as usize >= cfg.output_budget {
                        return self.stop(Stop::OutputBudget);
                    }
                    if self.rands as usize >= cfg.rand_budget {
                        return self.stop(Stop::RandBudget);
                    }
                    return Next::Rand;
                }
                Op::Inc => {
                    self.steps += 1;
                    self.counter = (self.counter + 1) % COUNTER_MODULUS;
                    self.pc += 1;
                }
                Op::Dec => {
                    self.steps += 1;
                    self.counter = (self.counter + COUNTER_MODULUS - 1) % COUNTER_MODULUS;
                    self.pc += 1;
                }
                Op::Jmpz => {
                    self.steps += 1;
                    self.pc += if self.counter == 0 { 2 } else { 1 };
                }
                Op::Jmp => {
                    self.steps += 1;
                    self.pc = 0;
                }
                Op::Halt => {
                    self.steps += 1;
                    self.payload_pos = Some(0);
                }
            }
        }
    }

    /// Executes a pending `RAND` with the given random bit: the bit is
    /// emitted and, when it is 1, the counter is incremented.
    pub fn resolve_rand(&mut self, program: &Program, bit: bool) {
        debug_assert_eq!(program.ops().get(self.pc as usize), Some(&Op::Rand));
        debug_assert!(self.stopped.is_none() && self.payload_pos.is_none());
        self.steps += 1;
        self.rands += 1;
        self.emitted += 1;
        if bit {
            self.counter = (self.counter + 1) % COUNTER_MODULUS;
        }
        self.pc += 1;
    }
}
