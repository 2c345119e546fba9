use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{IncompleteFunction, LogicError};

/// XOR of monomials over GF(2). Each monomial is the sorted list of stage
/// indices it multiplies; the empty monomial is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AnfExpression {
    monomials: BTreeSet<Vec<usize>>,
}

impl AnfExpression {
    pub fn new(monomials: impl IntoIterator<Item = Vec<usize>>) -> Self {
        let mut set = BTreeSet::new();
        for mut m in monomials {
            m.sort_unstable();
            m.dedup();
            // x ^ x = 0
            if !set.remove(&m) {
                set.insert(m);
            }
        }
        AnfExpression { monomials: set }
    }

    pub fn monomials(&self) -> &BTreeSet<Vec<usize>> {
        &self.monomials
    }

    pub fn degree(&self) -> usize {
        self.monomials.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Evaluates with `value(stage)` giving each variable.
    pub fn evaluate(&self, value: impl Fn(usize) -> bool) -> bool {
        self.monomials
            .iter()
            .filter(|m| m.iter().all(|&s| value(s)))
            .count()
            % 2
            == 1
    }
}

impl fmt::Display for AnfExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .monomials
            .iter()
            .map(|m| {
                if m.is_empty() {
                    "1".to_string()
                } else {
                    m.iter()
                        .map(|s| format!("x{s}"))
                        .collect::<Vec<_>>()
                        .join("*")
                }
            })
            .collect();
        write!(f, "{}", terms.join(" ^ "))
    }
}

/// Reed-Muller (ANF) form of a fully specified function, by the binary
/// Moebius transform over its truth table.
pub fn to_anf(f: &IncompleteFunction) -> Result<AnfExpression, LogicError> {
    if !f.is_fully_specified() {
        return Err(LogicError::IncompleteInput { target: f.target() });
    }
    let v = f.vars();
    let size = 1usize << v;
    let mut coeff: Vec<bool> = (0..size as u64)
        .map(|p| f.value_at(p).unwrap_or(false))
        .collect();
    for j in 0..v {
        let bit = 1 << j;
        for p in 0..size {
            if p & bit != 0 {
                coeff[p] ^= coeff[p ^ bit];
            }
        }
    }
    let support = f.support();
    Ok(AnfExpression {
        monomials: coeff
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(mask, _)| {
                let mut m: Vec<usize> = (0..v)
                    .filter(|j| mask >> j & 1 == 1)
                    .map(|j| support[j])
                    .collect();
                m.sort_unstable();
                m
            })
            .collect(),
    })
}
