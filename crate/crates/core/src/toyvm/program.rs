use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::bits::{gamma, BitString};

/// Bits per opcode slot.
pub const OPCODE_WIDTH: usize = 3;

/// The eight toyvm-1 instructions. The discriminant is the 3-bit opcode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Op {
    Emit0 = 0b000,
    Emit1 = 0b001,
    Rand = 0b010,
    Inc = 0b011,
    Dec = 0b100,
    Jmpz = 0b101,
    Jmp = 0b110,
    Halt = 0b111,
}

impl Op {
    pub const ALL: [Op; 8] = [
        Op::Emit0,
        Op::Emit1,
        Op::Rand,
        Op::Inc,
        Op::Dec,
        Op::Jmpz,
        Op::Jmp,
        Op::Halt,
    ];

    pub fn from_code(code: u8) -> Op {
        Op::ALL[usize::from(code & 0b111)]
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Op::Emit0 => "EMIT0",
            Op::Emit1 => "EMIT1",
            Op::Rand => "RAND",
            Op::Inc => "INC",
            Op::Dec => "DEC",
            Op::Jmpz => "JMPZ",
            Op::Jmp => "JMP",
            Op::Halt => "HALT",
        }
    }
}

impl FromStr for Op {
    type Err = AsmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Op::ALL
            .into_iter()
            .find(|op| op.mnemonic().eq_ignore_ascii_case(s))
            .ok_or_else(|| AsmError::UnknownMnemonic(s.to_string()))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("program header is not a complete Elias gamma codeword")]
    BadHeader,
    #[error("program length mismatch: header announces {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Bits(#[from] crate::bits::ParseBitsError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AsmError {
    #[error("unknown mnemonic {0:?}")]
    UnknownMnemonic(String),
    #[error("HALT payload must be a bitstring, got {0:?}")]
    BadPayload(String),
    #[error("instructions after HALT are payload; use HALT:<bits> instead")]
    CodeAfterHalt,
}

/// A self-delimiting toyvm-1 program: an Elias gamma header announcing the
/// body length `l` (coded as `gamma(l + 1)`), then exactly `l` body bits.
///
/// The body is read as consecutive 3-bit opcodes. Once a `HALT` opcode is
/// read, every remaining body bit is its literal payload. Without a `HALT`,
/// fewer than three trailing bits are padding and ignored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Program {
    code: BitString,
    header_len: usize,
    ops: Vec<Op>,
    payload: BitString,
}

impl Program {
    pub fn decode(bits: &BitString) -> Result<Program, DecodeError> {
        let (n, header_len) = gamma::decode_prefix(bits.bits()).ok_or(DecodeError::BadHeader)?;
        let body_len = usize::try_from(n - 1).map_err(|_| DecodeError::BadHeader)?;
        let expected = header_len + body_len;
        if bits.len() != expected {
            return Err(DecodeError::LengthMismatch {
                expected,
                got: bits.len(),
            });
        }
        Ok(Self::from_parts(bits.clone(), header_len))
    }

    fn from_parts(code: BitString, header_len: usize) -> Program {
        let body = &code.bits()[header_len..];
        let mut ops = Vec::new();
        let mut payload = BitString::new();
        let mut i = 0;
        while i + OPCODE_WIDTH <= body.len() {
            let op = Op::from_code(
                body[i..i + OPCODE_WIDTH]
                    .iter()
                    .fold(0u8, |acc, &b| (acc << 1) | u8::from(b)),
            );
            i += OPCODE_WIDTH;
            ops.push(op);
            if op == Op::Halt {
                payload = BitString::from(&body[i..]);
                break;
            }
        }
        Program {
            code,
            header_len,
            ops,
            payload,
        }
    }

    /// Builds the program for `ops` followed (if the last op is `HALT`) by
    /// `payload`, plus `padding` trailing bits (only allowed without `HALT`).
    pub fn assemble(ops: &[Op], payload: &BitString, padding: &BitString) -> Result<Program, AsmError> {
        if let Some(pos) = ops.iter().position(|&op| op == Op::Halt) {
            if pos + 1 != ops.len() {
                return Err(AsmError::CodeAfterHalt);
            }
        } else if !payload.is_empty() {
            return Err(AsmError::BadPayload(payload.to_string()));
        }
        assert!(padding.len() < OPCODE_WIDTH || ops.last() == Some(&Op::Halt));
        let mut body = BitString::new();
        for op in ops {
            body.extend_from(&BitString::from_u64(u64::from(op.code()), OPCODE_WIDTH));
        }
        body.extend_from(payload);
        if ops.last() != Some(&Op::Halt) {
            body.extend_from(padding);
        }
        let header = gamma::encode(body.len() as u64 + 1);
        let header_len = header.len();
        Ok(Self::from_parts(header.concat(&body), header_len))
    }

    /// Parses assembly such as `"EMIT1 EMIT1 HALT"` or `"RAND HALT:0110"`.
    pub fn from_asm(src: &str) -> Result<Program, AsmError> {
        let mut ops = Vec::new();
        let mut payload = BitString::new();
        for token in src.split_whitespace() {
            if ops.last() == Some(&Op::Halt) {
                return Err(AsmError::CodeAfterHalt);
            }
            let (mnemonic, data) = match token.split_once(':') {
                Some((m, d)) => (m, Some(d)),
                None => (token, None),
            };
            let op: Op = mnemonic.parse()?;
            if let Some(d) = data {
                if op != Op::Halt {
                    return Err(AsmError::BadPayload(d.to_string()));
                }
                payload = d.parse().map_err(|_| AsmError::BadPayload(d.to_string()))?;
            }
            ops.push(op);
        }
        Self::assemble(&ops, &payload, &BitString::new())
    }

    pub fn code(&self) -> &BitString {
        &self.code
    }

    /// `|P|`, the total length in bits including the header.
    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_empty()
    }

    pub fn body_len(&self) -> usize {
        self.code.len() - self.header_len
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn payload(&self) -> &BitString {
        &self.payload
    }

    pub fn uses_rand(&self) -> bool {
        self.ops.contains(&Op::Rand)
    }

    /// The same-length program with `EMIT0`/`EMIT1` exchanged and the
    /// payload complemented.
    pub fn bit_flipped(&self) -> Program {
        let mut code = self.code.bits().to_vec();
        let mut at = self.header_len;
        for op in &self.ops {
            if matches!(op, Op::Emit0 | Op::Emit1) {
                code[at + OPCODE_WIDTH - 1] ^= true;
            }
            at += OPCODE_WIDTH;
        }
        if self.ops.last() == Some(&Op::Halt) {
            for b in &mut code[at..] {
                *b = !*b;
            }
        }
        Self::from_parts(BitString::from_bits(code), self.header_len)
    }

    pub fn asm(&self) -> String {
        let mut parts: Vec<String> = self.ops.iter().map(|op| op.mnemonic().to_string()).collect();
        if let Some(last) = parts.last_mut() {
            if self.ops.last() == Some(&Op::Halt) && !self.payload.is_empty() {
                last.push(':');
                last.push_str(&self.payload.to_string());
            }
        }
        parts.join(" ")
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Program({} = [{}])", self.code, self.asm())
    }
}

impl FromStr for Program {
    type Err = DecodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Program::decode(&s.parse()?)
    }
}

impl Serialize for Program {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.code)
    }
}

impl<'de> Deserialize<'de> for Program {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
