//! Incompletely specified bit sequences, scan-pattern sets, and their
//! encoding into `2^p`-ary digit streams.
//!
//! Within a digit the earlier sequence bit is the more significant one, so
//! `"10"` encodes to the value 2 and lands in the higher output stage of a
//! machine state.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported degree of parallelization (digits are packed in `u64`).
pub const MAX_PARALLELIZATION: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("illegal character {ch:?} at position {position}")]
    IllegalCharacter { position: usize, ch: char },
    #[error("sequence contains no bits")]
    EmptySequence,
    #[error("pattern set contains no patterns")]
    EmptyPatternSet,
    #[error("pattern {index} has width {found}, expected {expected}")]
    PatternWidthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid degree of parallelization {p} for a sequence of {n} bits")]
    InvalidParallelization { p: usize, n: usize },
}

/// One position of a target sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TernaryBit {
    Zero,
    One,
    DontCare,
}

impl TernaryBit {
    pub fn from_bool(bit: bool) -> Self {
        if bit {
            TernaryBit::One
        } else {
            TernaryBit::Zero
        }
    }

    pub fn is_specified(self) -> bool {
        self != TernaryBit::DontCare
    }

    pub fn value(self) -> Option<bool> {
        match self {
            TernaryBit::Zero => Some(false),
            TernaryBit::One => Some(true),
            TernaryBit::DontCare => None,
        }
    }

    /// True when a concrete bit is acceptable at this position.
    pub fn admits(self, bit: bool) -> bool {
        self.value().is_none_or(|v| v == bit)
    }

    pub fn to_char(self) -> char {
        match self {
            TernaryBit::Zero => '0',
            TernaryBit::One => '1',
            TernaryBit::DontCare => 'X',
        }
    }

    fn from_char(ch: char) -> Option<Self> {
        match ch {
            '0' => Some(TernaryBit::Zero),
            '1' => Some(TernaryBit::One),
            'x' | 'X' | '-' => Some(TernaryBit::DontCare),
            _ => None,
        }
    }
}

impl fmt::Display for TernaryBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Counts of specified and don't-care positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecifiedStats {
    pub specified: usize,
    pub dontcare: usize,
    pub fraction: f64,
}

/// A non-empty sequence over `{0, 1, X}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernarySequence {
    bits: Vec<TernaryBit>,
}

impl TernarySequence {
    pub fn new(bits: Vec<TernaryBit>) -> Result<Self, SeqError> {
        if bits.is_empty() {
            return Err(SeqError::EmptySequence);
        }
        Ok(TernarySequence { bits })
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self, SeqError> {
        Self::new(bits.iter().map(|&b| TernaryBit::from_bool(b)).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[TernaryBit] {
        &self.bits
    }

    pub fn get(&self, index: usize) -> Option<TernaryBit> {
        self.bits.get(index).copied()
    }

    pub fn specified_stats(&self) -> SpecifiedStats {
        specified_stats(self)
    }
}

impl fmt::Display for TernarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in &self.bits {
            write!(f, "{}", bit.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for TernarySequence {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sequence(s)
    }
}

/// Parses `{0, 1, x, X, -}` with interleaved whitespace.
pub fn parse_sequence(text: &str) -> Result<TernarySequence, SeqError> {
    let mut bits = Vec::new();
    for (position, ch) in text.chars().enumerate() {
        if ch.is_whitespace() {
            continue;
        }
        match TernaryBit::from_char(ch) {
            Some(bit) => bits.push(bit),
            None => return Err(SeqError::IllegalCharacter { position, ch }),
        }
    }
    TernarySequence::new(bits)
}

/// Parses a sequence file: like [`parse_sequence`], but lines whose first
/// non-blank character is `#` are skipped.
pub fn parse_sequence_file(text: &str) -> Result<TernarySequence, SeqError> {
    let mut bits = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let chars = line.chars().count();
        if !line.trim_start().starts_with('#') {
            for (i, ch) in line.chars().enumerate() {
                if ch.is_whitespace() {
                    continue;
                }
                match TernaryBit::from_char(ch) {
                    Some(bit) => bits.push(bit),
                    None => {
                        return Err(SeqError::IllegalCharacter {
                            position: offset + i,
                            ch,
                        })
                    }
                }
            }
        }
        offset += chars;
    }
    TernarySequence::new(bits)
}

pub fn specified_stats(a: &TernarySequence) -> SpecifiedStats {
    let specified = a.bits.iter().filter(|b| b.is_specified()).count();
    let n = a.len();
    SpecifiedStats {
        specified,
        dontcare: n - specified,
        fraction: specified as f64 / n as f64,
    }
}

/// How scan patterns are serialized into one sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ChainOrder {
    /// Pattern `i` occupies positions `[i*w, (i+1)*w)`.
    #[default]
    PatternMajor,
}

/// A set of equal-width scan patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    patterns: Vec<TernarySequence>,
    width: usize,
}

impl PatternSet {
    pub fn new(patterns: Vec<TernarySequence>) -> Result<Self, SeqError> {
        let width = patterns.first().ok_or(SeqError::EmptyPatternSet)?.len();
        for (index, pattern) in patterns.iter().enumerate() {
            if pattern.len() != width {
                return Err(SeqError::PatternWidthMismatch {
                    index,
                    expected: width,
                    found: pattern.len(),
                });
            }
        }
        Ok(PatternSet { patterns, width })
    }

    pub fn patterns(&self) -> &[TernarySequence] {
        &self.patterns
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn count(&self) -> usize {
        self.patterns.len()
    }

    /// A new set holding the patterns at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, SeqError> {
        Self::new(indices.iter().map(|&i| self.patterns[i].clone()).collect())
    }

    pub fn flatten(&self, order: ChainOrder) -> TernarySequence {
        match order {
            ChainOrder::PatternMajor => TernarySequence {
                bits: self
                    .patterns
                    .iter()
                    .flat_map(|p| p.bits.iter().copied())
                    .collect(),
            },
        }
    }
}

impl fmt::Display for PatternSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pattern in &self.patterns {
            writeln!(f, "{pattern}")?;
        }
        Ok(())
    }
}

/// Parses a pattern file: one pattern per line, `#` comment lines and blank
/// lines ignored.
pub fn parse_patterns(text: &str) -> Result<PatternSet, SeqError> {
    let mut patterns = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            let pattern = parse_sequence(line).map_err(|err| match err {
                SeqError::IllegalCharacter { position, ch } => SeqError::IllegalCharacter {
                    position: offset + position,
                    ch,
                },
                other => other,
            })?;
            patterns.push(pattern);
        }
        offset += line.chars().count();
    }
    PatternSet::new(patterns)
}

/// One `p`-bit digit. Bit `p-1-j` of `value`/`care` holds sequence bit `j` of
/// the digit; don't-care bits read as 0 in `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Digit {
    pub value: u64,
    pub care: u64,
}

impl Digit {
    pub fn is_specified(&self, p: usize) -> bool {
        self.care == low_mask(p)
    }

    /// The ternary value held by output stage `stage` (bit `stage` of the digit).
    pub fn stage(&self, stage: usize) -> TernaryBit {
        if self.care >> stage & 1 == 0 {
            TernaryBit::DontCare
        } else {
            TernaryBit::from_bool(self.value >> stage & 1 == 1)
        }
    }

    /// Whether `value` agrees with every specified bit of the digit.
    pub fn admits(&self, value: u64) -> bool {
        (value ^ self.value) & self.care == 0
    }
}

pub(crate) fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// A sequence partitioned into `p`-bit digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitStream {
    pub p: usize,
    /// Length of the source sequence.
    pub n: usize,
    pub digits: Vec<Digit>,
    /// Occurrences of each fully specified digit value.
    pub counts: BTreeMap<u64, usize>,
    /// Largest entry of `counts`, or 0 when no digit is fully specified.
    pub n_max: usize,
}

impl DigitStream {
    pub fn r(&self) -> usize {
        self.digits.len()
    }

    pub fn unspecified_digits(&self) -> usize {
        self.digits.iter().filter(|d| !d.is_specified(self.p)).count()
    }

    /// Concatenates the digits back into a sequence of length `n`.
    pub fn to_sequence(&self) -> TernarySequence {
        let mut bits = Vec::with_capacity(self.r() * self.p);
        for digit in &self.digits {
            for j in 0..self.p {
                bits.push(digit.stage(self.p - 1 - j));
            }
        }
        bits.truncate(self.n);
        TernarySequence { bits }
    }
}

pub fn encode(a: &TernarySequence, p: usize) -> Result<DigitStream, SeqError> {
    let n = a.len();
    if p == 0 || p > n || p > MAX_PARALLELIZATION {
        return Err(SeqError::InvalidParallelization { p, n });
    }
    let full = low_mask(p);
    let mut digits = Vec::with_capacity(n.div_ceil(p));
    let mut counts = BTreeMap::new();
    for chunk in a.bits.chunks(p) {
        let mut value = 0u64;
        let mut care = 0u64;
        for (j, bit) in chunk.iter().enumerate() {
            let pos = p - 1 - j;
            if let Some(v) = bit.value() {
                care |= 1 << pos;
                value |= u64::from(v) << pos;
            }
        }
        if care == full {
            *counts.entry(value).or_insert(0) += 1;
        }
        digits.push(Digit { value, care });
    }
    let n_max = counts.values().copied().max().unwrap_or(0);
    Ok(DigitStream {
        p,
        n,
        digits,
        counts,
        n_max,
    })
}
