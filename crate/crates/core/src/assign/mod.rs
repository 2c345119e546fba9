//! State assignment for binary machines.
//!
//! A state is an integer whose bit `j` is the value of stage `j`. Stages
//! `0..p` carry the output digit; the stages above carry either a
//! permutation tag (presented algorithm) or an occurrence counter (the
//! minimal-stage baseline).

mod fill;
mod permutation;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{IncompleteFunction, LogicError};
use crate::seq::{encode, low_mask, DigitStream, SeqError, TernaryBit, TernarySequence};

pub use fill::{fill_digits, Fill};
pub use permutation::{
    expand_permutation, lfsr_step, primitive_polynomial, Permutation, PermutationSpec, MAX_TAG_WIDTH,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssignError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("permutation provides {available} distinct tags, {needed} needed")]
    PermutationTooShort { needed: usize, available: usize },
    #[error("a sequence of {r} digit(s) needs no machine; at least 2 are required")]
    DegenerateSequence { r: usize },
    #[error("tag width {m} is outside 1..=32")]
    TagWidth { m: usize },
    #[error("{0}")]
    InvalidPermutation(String),
    #[error("machine would need {k} stages, more than the supported 64")]
    TooManyStages { k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Output digit plus a permutation tag; feedback reads the tag only.
    #[default]
    Presented,
    /// Minimal stage count; feedback reads the whole state.
    Baseline,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Presented => "presented",
            Algorithm::Baseline => "baseline",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "presented" => Ok(Algorithm::Presented),
            "baseline" => Ok(Algorithm::Baseline),
            _ => Err(format!("unknown algorithm {s:?} (expected presented or baseline)")),
        }
    }
}

/// A next-state row: bit `j` of `value` is the new value of stage `j`
/// wherever bit `j` of `care` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NextState {
    pub value: u64,
    pub care: u64,
}

impl NextState {
    pub fn stage(&self, j: usize) -> TernaryBit {
        if self.care >> j & 1 == 0 {
            TernaryBit::DontCare
        } else {
            TernaryBit::from_bool(self.value >> j & 1 == 1)
        }
    }

    /// Most significant stage first, `X` for unconstrained stages.
    pub fn render(&self, k: usize) -> String {
        (0..k).rev().map(|j| self.stage(j).to_char()).collect()
    }
}

/// One care row of the transition table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    /// Input point over the support: bit `i` is the value of stage `support[i]`.
    pub point: u64,
    pub next: NextState,
}

/// `state` as a `k`-character string, stage `k-1` first.
pub fn format_state(state: u64, k: usize) -> String {
    (0..k).rev().map(|j| if state >> j & 1 == 1 { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateAssignment {
    pub algorithm: Algorithm,
    pub p: usize,
    /// Stages above the output digit.
    pub m: usize,
    /// Source sequence length.
    pub n: usize,
    states: Vec<u64>,
    support: Vec<usize>,
    transitions: Vec<Transition>,
}

impl StateAssignment {
    pub fn k(&self) -> usize {
        self.p + self.m
    }

    pub fn r(&self) -> usize {
        self.states.len()
    }

    /// Visited states in order; don't-care output bits read as 0.
    pub fn states(&self) -> &[u64] {
        &self.states
    }

    /// Stages the feedback functions may read.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial_state(&self) -> u64 {
        self.states[0]
    }

    /// Value of the support stages of `state`, packed as an input point.
    pub fn point_of(&self, state: u64) -> u64 {
        self.support
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &stage)| acc | (state >> stage & 1) << i)
    }

    /// One incompletely specified feedback function per stage.
    pub fn functions(&self) -> Result<Vec<IncompleteFunction>, LogicError> {
        (0..self.k())
            .map(|stage| {
                let rows = self
                    .transitions
                    .iter()
                    .filter(|t| t.next.care >> stage & 1 == 1)
                    .map(|t| (t.point, t.next.value >> stage & 1 == 1));
                IncompleteFunction::new(stage, self.support.clone(), rows)
            })
            .collect()
    }
}

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub fn ceil_log2(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

/// Stage count of the minimal-stage baseline: `⌈log₂ N_max⌉ + p`.
pub fn min_stages(ds: &DigitStream) -> usize {
    ceil_log2(ds.n_max.max(1)) + ds.p
}

/// The presented assignment: state `i` is digit `i` with tag `π_i` above it.
pub fn assign_states(
    a: &TernarySequence,
    p: usize,
    perm: &Permutation,
) -> Result<StateAssignment, AssignError> {
    let ds = encode(a, p)?;
    let r = ds.r();
    if r < 2 {
        return Err(AssignError::DegenerateSequence { r });
    }
    let m = ceil_log2(r).max(1);
    if p + m > 64 {
        return Err(AssignError::TooManyStages { k: p + m });
    }
    let tags = expand_permutation(&PermutationSpec { kind: perm.clone(), m }, r)?;
    let states: Vec<u64> = tags
        .iter()
        .zip(&ds.digits)
        .map(|(&tag, d)| tag << p | d.value)
        .collect();
    let tag_care = low_mask(m) << p;
    let transitions = (0..r - 1)
        .map(|i| Transition {
            point: tags[i],
            next: NextState {
                value: states[i + 1],
                care: tag_care | ds.digits[i + 1].care,
            },
        })
        .collect();
    Ok(StateAssignment {
        algorithm: Algorithm::Presented,
        p,
        m,
        n: a.len(),
        states,
        support: (p..p + m).collect(),
        transitions,
    })
}

/// The minimal-stage baseline: after filling don't cares, occurrence `c` of
/// digit value `v` becomes state `c·2^p + v`.
pub fn assign_states_minimal(
    a: &TernarySequence,
    p: usize,
    fill: Fill,
) -> Result<StateAssignment, AssignError> {
    let ds = encode(a, p)?;
    let r = ds.r();
    if r < 2 {
        return Err(AssignError::DegenerateSequence { r });
    }
    let values = fill_digits(&ds.digits, p, fill);
    let mut seen = std::collections::HashMap::new();
    let states: Vec<u64> = values
        .iter()
        .map(|&v| {
            let c = seen.entry(v).or_insert(0u64);
            *c += 1;
            (*c - 1) << p | v
        })
        .collect();
    let n_max = seen.values().copied().max().unwrap_or(1) as usize;
    let k = ceil_log2(n_max) + p;
    if k > 64 {
        return Err(AssignError::TooManyStages { k });
    }
    let full = low_mask(k);
    let transitions = states
        .windows(2)
        .map(|w| Transition {
            point: w[0],
            next: NextState { value: w[1], care: full },
        })
        .collect();
    Ok(StateAssignment {
        algorithm: Algorithm::Baseline,
        p,
        m: k - p,
        n: a.len(),
        states,
        support: (0..k).collect(),
        transitions,
    })
}
