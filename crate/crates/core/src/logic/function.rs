use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::LogicError;

/// A Boolean function given by its care rows over an ordered support.
///
/// Bit `i` of an input point is the value of stage `support[i]`. Points
/// without a row are don't cares.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncompleteFunction {
    target: usize,
    support: Vec<usize>,
    care: BTreeMap<u64, bool>,
}

impl IncompleteFunction {
    pub fn new(
        target: usize,
        support: Vec<usize>,
        rows: impl IntoIterator<Item = (u64, bool)>,
    ) -> Result<Self, LogicError> {
        let duplicate = if support.len() <= 16 {
            (0..support.len())
                .filter(|&i| support[..i].contains(&support[i]))
                .map(|i| support[i])
                .min()
        } else {
            let mut sorted = support.clone();
            sorted.sort_unstable();
            sorted.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
        };
        if let Some(stage) = duplicate {
            return Err(LogicError::DuplicateSupport { stage });
        }
        let vars = support.len();
        if vars > 63 {
            return Err(LogicError::SupportTooWide { vars, limit: 63 });
        }
        let mut rows: Vec<(u64, bool)> = rows.into_iter().collect();
        if !rows.is_sorted() {
            rows.sort_unstable();
        }
        rows.dedup();
        for w in rows.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(LogicError::InconsistentSpec { target, point: w[0].0 });
            }
        }
        if let Some(&(point, _)) = rows.last().filter(|(p, _)| p >> vars != 0) {
            return Err(LogicError::PointOutOfRange { point, vars });
        }
        let care: BTreeMap<u64, bool> = rows.into_iter().collect();
        Ok(IncompleteFunction {
            target,
            support,
            care,
        })
    }

    /// A fully specified function from a table indexed by input point.
    pub fn from_truth_table(
        target: usize,
        support: Vec<usize>,
        table: &[bool],
    ) -> Result<Self, LogicError> {
        let expected = 1usize << support.len();
        if table.len() != expected {
            return Err(LogicError::TableSize {
                expected,
                found: table.len(),
            });
        }
        Self::new(
            target,
            support,
            table.iter().enumerate().map(|(i, &v)| (i as u64, v)),
        )
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn vars(&self) -> usize {
        self.support.len()
    }

    pub fn care_rows(&self) -> &BTreeMap<u64, bool> {
        &self.care
    }

    pub fn value_at(&self, point: u64) -> Option<bool> {
        self.care.get(&point).copied()
    }

    pub fn is_fully_specified(&self) -> bool {
        self.care.len() as u128 == 1u128 << self.vars()
    }
}

/// Which completions of the don't-care rows a dependence query ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Completion {
    /// Variables that at least one completion depends on.
    AnyCompletion,
    /// Variables that every completion depends on.
    AllCompletions,
}

/// Stage indices `j` for which flipping `x_j` can change `f`.
pub fn dependence_set(f: &IncompleteFunction, completion: Completion) -> BTreeSet<usize> {
    if completion == Completion::AnyCompletion && !f.is_fully_specified() {
        // any don't-care row can be completed opposite to its neighbour
        // across every variable
        return f.support.iter().copied().collect();
    }
    let v = f.vars();
    let mut forced = vec![false; v];
    if v <= 6 {
        // one word holds the whole table
        let (mut care, mut ones) = (0u64, 0u64);
        for (&point, &value) in &f.care {
            care |= 1 << point;
            ones |= (value as u64) << point;
        }
        for (j, hit) in forced.iter_mut().enumerate() {
            let shift = 1 << j;
            let low = LOW_HALF[j] & low_mask_points(v);
            *hit = care & (care >> shift) & (ones ^ (ones >> shift)) & low != 0;
        }
    } else if v <= DENSE_VARS {
        let mut table = vec![2u8; 1 << v];
        for (&point, &value) in &f.care {
            table[point as usize] = value as u8;
        }
        for (j, hit) in forced.iter_mut().enumerate() {
            let bit = 1 << j;
            *hit = (0..table.len())
                .filter(|x| x & bit == 0)
                .any(|x| (table[x] ^ table[x | bit]) == 1);
        }
    } else {
        for (&point, &value) in &f.care {
            for (j, hit) in forced.iter_mut().enumerate() {
                let other = point ^ (1 << j);
                if !*hit && point < other && f.care.get(&other).is_some_and(|&o| o != value) {
                    *hit = true;
                }
            }
        }
    }
    f.support
        .iter()
        .zip(forced)
        .filter(|(_, hit)| *hit)
        .map(|(&stage, _)| stage)
        .collect()
}

const DENSE_VARS: usize = 16;

/// Points of a 6-variable table whose bit `j` is clear.
const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

fn low_mask_points(v: usize) -> u64 {
    if v == 6 {
        u64::MAX
    } else {
        (1 << (1 << v)) - 1
    }
}
