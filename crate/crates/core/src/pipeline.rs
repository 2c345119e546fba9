//! Sequence in, verified machine out.

use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::assign::{assign_states, assign_states_minimal, ceil_log2, Algorithm, Fill, Permutation, StateAssignment};
use crate::logic::{minimize, MinimizeOptions};
use crate::machine::{verify_against, BinaryMachine, Verification};
use crate::seq::{TernarySequence, MAX_PARALLELIZATION};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisConfig {
    pub algorithm: Algorithm,
    pub p: usize,
    /// Tag order for the presented algorithm.
    pub perm: Permutation,
    /// Don't-care fill for the baseline.
    pub fill: Fill,
    pub minimize: MinimizeOptions,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            algorithm: Algorithm::Presented,
            p: 1,
            perm: Permutation::default(),
            fill: Fill::BalanceDigits,
            minimize: MinimizeOptions::default(),
        }
    }
}

impl SynthesisConfig {
    pub fn presented(p: usize) -> Self {
        SynthesisConfig { p, ..Default::default() }
    }

    pub fn baseline(p: usize) -> Self {
        SynthesisConfig {
            algorithm: Algorithm::Baseline,
            p,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub assignment: StateAssignment,
    pub machine: BinaryMachine,
}

impl Synthesis {
    pub fn stages(&self) -> usize {
        self.machine.k()
    }

    pub fn gates(&self) -> usize {
        self.machine.gate_count()
    }

    /// `stages=6 gates=7 verify=pass`
    pub fn summary(&self) -> String {
        format!("stages={} gates={} verify=pass", self.stages(), self.gates())
    }
}

pub fn assign(a: &TernarySequence, config: &SynthesisConfig) -> Result<StateAssignment, Error> {
    Ok(match config.algorithm {
        Algorithm::Presented => assign_states(a, config.p, &config.perm)?,
        Algorithm::Baseline => assign_states_minimal(a, config.p, config.fill)?,
    })
}

/// Assigns states, minimizes the feedback, builds the machine and checks its
/// output against `a`.
pub fn synthesize(a: &TernarySequence, config: &SynthesisConfig) -> Result<Synthesis, Error> {
    let assignment = assign(a, config)?;
    let feedback = minimize(&assignment.functions()?, &config.minimize)?;
    let machine = BinaryMachine::build(&assignment, feedback)?;
    match verify_against(&machine, a, config.p)? {
        Verification::Pass => Ok(Synthesis { assignment, machine }),
        Verification::Mismatch { position, .. } => Err(Error::Mismatch { position }),
    }
}

/// `1..=⌈log₂ n⌉`, clipped to what the sequence and the digit packing allow.
pub fn default_sweep_range(n: usize) -> RangeInclusive<usize> {
    let hi = ceil_log2(n.max(2)).min(n.saturating_sub(1).max(1)).min(MAX_PARALLELIZATION);
    1..=hi
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub p: usize,
    pub outcome: Result<SweepResult, String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepResult {
    pub stages: usize,
    pub gates: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub algorithm: Algorithm,
    /// Cheapest first, ties to the smaller `p`; failed rows last.
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn best(&self) -> Option<(usize, SweepResult)> {
        self.rows.first().and_then(|r| r.outcome.as_ref().ok().map(|o| (r.p, *o)))
    }
}

/// Runs the full pipeline once per candidate `p`. A failing row is recorded
/// and the sweep continues.
pub fn sweep_parallelization(
    a: &TernarySequence,
    p_range: Option<RangeInclusive<usize>>,
    template: &SynthesisConfig,
) -> SweepReport {
    let range = p_range.unwrap_or_else(|| default_sweep_range(a.len()));
    let mut rows: Vec<SweepRow> = range
        .map(|p| {
            let started = Instant::now();
            let config = SynthesisConfig { p, ..template.clone() };
            let outcome = synthesize(a, &config)
                .map(|s| SweepResult {
                    stages: s.stages(),
                    gates: s.gates(),
                })
                .map_err(|e| e.to_string());
            SweepRow {
                p,
                outcome,
                elapsed: started.elapsed(),
            }
        })
        .collect();
    rows.sort_by_key(|row| match &row.outcome {
        Ok(o) => (0, o.gates, row.p),
        Err(_) => (1, 0, row.p),
    });
    SweepReport {
        algorithm: template.algorithm,
        rows,
    }
}
