//! Bitstrings and the Elias gamma code used for program headers and set listings.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid bit character {0:?} (expected '0' or '1')")]
pub struct ParseBitsError(pub char);

/// A finite string of bits, written as ASCII `0`/`1`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    /// The `width` low-order bits of `value`, most significant first.
    pub fn from_u64(value: u64, width: usize) -> Self {
        BitString((0..width).rev().map(|i| (value >> i) & 1 == 1).collect())
    }

    /// Interprets the bits as an unsigned integer, most significant first.
    pub fn to_u64(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
    }

    /// All bitstrings of exactly `width` bits, in lexicographic order.
    pub fn all_of_length(width: usize) -> impl Iterator<Item = BitString> {
        assert!(width < 64);
        (0..1u64 << width).map(move |v| BitString::from_u64(v, width))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn with(&self, bit: bool) -> BitString {
        let mut out = self.clone();
        out.push(bit);
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString(self.0[start..end].to_vec())
    }

    pub fn prefix(&self, len: usize) -> BitString {
        self.slice(0, len)
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn complement(&self) -> BitString {
        BitString(self.0.iter().map(|b| !b).collect())
    }

    /// Shortlex order: shorter strings first, then lexicographic.
    pub fn shortlex_cmp(&self, other: &BitString) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shortlex_cmp(other)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseBitsError(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl From<&[bool]> for BitString {
    fn from(bits: &[bool]) -> Self {
        BitString(bits.to_vec())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Elias gamma code for positive integers: `floor(log2 n)` zeros followed by
/// the binary expansion of `n`.
pub mod gamma {
    use super::BitString;

    pub fn encode(n: u64) -> BitString {
        assert!(n >= 1, "gamma code is defined for n >= 1");
        let width = 64 - n.leading_zeros() as usize;
        let mut out = BitString::from_bits(vec![false; width - 1]);
        out.extend_from(&BitString::from_u64(n, width));
        out
    }

    /// Length in bits of `encode(n)`.
    pub fn encoded_len(n: u64) -> usize {
        assert!(n >= 1);
        2 * (63 - n.leading_zeros() as usize) + 1
    }

    /// Decodes one codeword from the front of `bits`, returning the value and
    /// the number of bits consumed, or `None` if `bits` ends mid-codeword.
    pub fn decode_prefix(bits: &[bool]) -> Option<(u64, usize)> {
        let zeros = bits.iter().take_while(|&&b| !b).count();
        if zeros >= 63 || bits.len() < 2 * zeros + 1 {
            return None;
        }
        let value = bits[zeros..=2 * zeros]
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b));
        Some((value, 2 * zeros + 1))
    }
}
