//! Binary machines: `k` stages updated together, each by its own feedback
//! function of the current state. NLFSRs and LFSRs are the special case
//! where all stages but one just shift.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assign::{format_state, StateAssignment};
use crate::logic::{
    care_equivalent, netlist_from_assignments, CareCheck, CheckMode, Gate, LogicError, Netlist,
    NodeId,
};
use crate::seq::TernarySequence;

/// Version written into exported machine files.
pub const FORMAT_VERSION: u32 = 1;

/// Widest machine the `u64` state representation holds.
pub const MAX_STAGES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("a machine needs 1..=64 stages and 1..=k output taps (k={k}, p={p})")]
    Shape { k: usize, p: usize },
    #[error("feedback for stage x{stage} is missing")]
    MissingFeedback { stage: usize },
    #[error("feedback drives x{stage}, which is not a stage of a {k}-stage machine")]
    StrayFeedback { stage: usize, k: usize },
    #[error("feedback reads x{stage}, which is not a stage of a {k}-stage machine")]
    StrayInput { stage: usize, k: usize },
    #[error("initial state {state:#b} does not fit in {k} stages")]
    InitialState { state: u64, k: usize },
    #[error("feedback reads x{stage}, outside the assignment support")]
    OutsideSupport { stage: usize },
    #[error("feedback for stage x{target} violates the care row at input point {point:#b}")]
    VerificationFailed { target: usize, point: u64 },
    #[error("machine emits {machine} bits per cycle, verification asked for {requested}")]
    ParallelizationMismatch { machine: usize, requested: usize },
    #[error("machine file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMachine {
    k: usize,
    p: usize,
    feedback: Netlist,
    initial_state: u64,
}

/// States visited and bits emitted by a simulation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// `cycles + 1` states, starting with the initial state.
    pub states: Vec<u64>,
    /// `p` bits per cycle.
    pub emitted: Vec<bool>,
}

impl Trace {
    pub fn emitted_string(&self) -> String {
        self.emitted.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Outcome of comparing a machine's output with a target sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verification {
    Pass,
    Mismatch { position: usize, expected: bool },
}

impl Verification {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verification::Pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Json,
    StructuralText,
}

impl BinaryMachine {
    pub fn new(k: usize, p: usize, feedback: Netlist, initial_state: u64) -> Result<Self, MachineError> {
        if k == 0 || k > MAX_STAGES || p == 0 || p > k {
            return Err(MachineError::Shape { k, p });
        }
        if k < 64 && initial_state >> k != 0 {
            return Err(MachineError::InitialState { state: initial_state, k });
        }
        for &stage in feedback.inputs() {
            if stage >= k {
                return Err(MachineError::StrayInput { stage, k });
            }
        }
        for &stage in feedback.outputs().keys() {
            if stage >= k {
                return Err(MachineError::StrayFeedback { stage, k });
            }
        }
        if let Some(stage) = (0..k).find(|s| !feedback.outputs().contains_key(s)) {
            return Err(MachineError::MissingFeedback { stage });
        }
        Ok(BinaryMachine {
            k,
            p,
            feedback,
            initial_state,
        })
    }

    /// Feedback given as one expression per stage, e.g. `(3, "x0 ^ x3")`.
    pub fn from_expressions(
        k: usize,
        p: usize,
        initial_state: u64,
        feedback: &[(usize, &str)],
    ) -> Result<Self, MachineError> {
        let inputs: Vec<usize> = (0..k).collect();
        let net = netlist_from_assignments(&inputs, feedback)?;
        BinaryMachine::new(k, p, net, initial_state)
    }

    /// A shift register whose stage `i < k-1` takes `x_{i+1}` and whose top
    /// stage takes `feedback`. Emits stage 0.
    pub fn shift_register(k: usize, feedback: &str, initial_state: u64) -> Result<Self, MachineError> {
        let shifts: Vec<String> = (1..k).map(|i| format!("x{i}")).collect();
        let mut exprs: Vec<(usize, &str)> = shifts.iter().enumerate().map(|(i, e)| (i, e.as_str())).collect();
        exprs.push((k - 1, feedback));
        BinaryMachine::from_expressions(k, 1, initial_state, &exprs)
    }

    /// The shift register that realizes LFSR recurrence `poly` (bit `i` holds
    /// the coefficient of `x^i`, degree `k`).
    pub fn lfsr(k: usize, poly: u64, initial_state: u64) -> Result<Self, MachineError> {
        let taps: Vec<String> = (0..k).filter(|j| poly >> j & 1 == 1).map(|j| format!("x{j}")).collect();
        let expr = if taps.is_empty() { "0".to_string() } else { taps.join(" ^ ") };
        BinaryMachine::shift_register(k, &expr, initial_state)
    }

    /// The machine realizing an assignment with the given feedback circuit,
    /// after checking the circuit against every care row.
    pub fn build(sa: &StateAssignment, feedback: Netlist) -> Result<Self, MachineError> {
        for &stage in feedback.inputs() {
            if !sa.support().contains(&stage) {
                return Err(MachineError::OutsideSupport { stage });
            }
        }
        let fs = sa.functions()?;
        if let CareCheck::Counterexample { target, point } =
            care_equivalent(&feedback, &fs, CheckMode::Exhaustive)?
        {
            return Err(MachineError::VerificationFailed { target, point });
        }
        BinaryMachine::new(sa.k(), sa.p, feedback, sa.initial_state())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn feedback(&self) -> &Netlist {
        &self.feedback
    }

    pub fn initial_state(&self) -> u64 {
        self.initial_state
    }

    pub fn gate_count(&self) -> usize {
        self.feedback.gate_count()
    }

    pub fn step(&self, state: u64) -> u64 {
        let program = Program::compile(self);
        program.step(state, &mut vec![false; program.ops.len()])
    }

    /// Runs `cycles` synchronous updates. Each cycle first emits output stages
    /// `p-1` down to `0` of the current state, then updates every stage.
    pub fn simulate(&self, cycles: usize) -> Trace {
        let program = Program::compile(self);
        let mut slots = vec![false; program.ops.len()];
        let mut states = Vec::with_capacity(cycles + 1);
        let mut emitted = Vec::with_capacity(cycles * self.p);
        let mut state = self.initial_state;
        states.push(state);
        for _ in 0..cycles {
            emitted.extend((0..self.p).rev().map(|j| state >> j & 1 == 1));
            state = program.step(state, &mut slots);
            states.push(state);
        }
        Trace { states, emitted }
    }

    /// Cycles until the initial state recurs, if it does within `limit`.
    pub fn period(&self, limit: usize) -> Option<usize> {
        let program = Program::compile(self);
        let mut slots = vec![false; program.ops.len()];
        let mut state = self.initial_state;
        for cycle in 1..=limit {
            state = program.step(state, &mut slots);
            if state == self.initial_state {
                return Some(cycle);
            }
        }
        None
    }

    pub fn export(&self, format: ExportFormat) -> String {
        match format {
            ExportFormat::Json => {
                let file = MachineFile {
                    format_version: FORMAT_VERSION,
                    k: self.k,
                    p: self.p,
                    initial_state: format_state(self.initial_state, self.k),
                    inputs: self.feedback.inputs().to_vec(),
                    nodes: self.feedback.nodes().to_vec(),
                    outputs: self.feedback.outputs().clone(),
                };
                let mut text = serde_json::to_string_pretty(&file).expect("machine serializes");
                text.push('\n');
                text
            }
            ExportFormat::StructuralText => {
                let mut out = String::new();
                let _ = writeln!(
                    out,
                    "# binary machine k={} p={} initial={} gates={} nodes={} depth={}",
                    self.k,
                    self.p,
                    format_state(self.initial_state, self.k),
                    self.gate_count(),
                    self.feedback.node_count(),
                    self.feedback.depth()
                );
                out.push_str(&self.feedback.to_structural_text());
                out
            }
        }
    }

    pub fn import_json(text: &str) -> Result<Self, MachineError> {
        let file: MachineFile =
            serde_json::from_str(text).map_err(|e| MachineError::Format(e.to_string()))?;
        if file.format_version != FORMAT_VERSION {
            return Err(MachineError::Format(format!(
                "unsupported format_version {}",
                file.format_version
            )));
        }
        if file.initial_state.len() != file.k {
            return Err(MachineError::Format(format!(
                "initial_state has {} bits, expected {}",
                file.initial_state.len(),
                file.k
            )));
        }
        let initial_state = u64::from_str_radix(&file.initial_state, 2)
            .map_err(|_| MachineError::Format("initial_state must be a bit string".into()))?;
        let net = Netlist::new(file.inputs, file.nodes, file.outputs)?;
        BinaryMachine::new(file.k, file.p, net, initial_state)
    }
}

/// Compares `ceil(n/p)` cycles of output with `a`; don't-care positions
/// always match.
pub fn verify_against(
    machine: &BinaryMachine,
    a: &TernarySequence,
    p: usize,
) -> Result<Verification, MachineError> {
    if machine.p != p {
        return Err(MachineError::ParallelizationMismatch {
            machine: machine.p,
            requested: p,
        });
    }
    let trace = machine.simulate(a.len().div_ceil(p));
    for (position, (want, &found)) in a.bits().iter().zip(&trace.emitted).enumerate() {
        if let Some(expected) = want.value() {
            if expected != found {
                return Ok(Verification::Mismatch { position, expected });
            }
        }
    }
    Ok(Verification::Pass)
}

#[derive(Serialize, Deserialize)]
struct MachineFile {
    format_version: u32,
    k: usize,
    p: usize,
    initial_state: String,
    inputs: Vec<usize>,
    nodes: Vec<Gate>,
    outputs: BTreeMap<usize, NodeId>,
}

/// The feedback netlist flattened for repeated single-state evaluation.
struct Program {
    ops: Vec<Op>,
    outputs: Vec<(usize, usize)>,
}

#[derive(Clone, Copy)]
enum Op {
    Stage(usize),
    Const(bool),
    Copy(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Xor(usize, usize),
}

impl Program {
    fn compile(machine: &BinaryMachine) -> Program {
        let ops = machine
            .feedback
            .nodes()
            .iter()
            .map(|gate| match *gate {
                Gate::Input { stage } => Op::Stage(stage),
                Gate::Const { value } => Op::Const(value),
                Gate::Buf { a } => Op::Copy(a as usize),
                Gate::Not { a } => Op::Not(a as usize),
                Gate::And { a, b } => Op::And(a as usize, b as usize),
                Gate::Or { a, b } => Op::Or(a as usize, b as usize),
                Gate::Xor { a, b } => Op::Xor(a as usize, b as usize),
            })
            .collect();
        let outputs = machine
            .feedback
            .outputs()
            .iter()
            .map(|(&stage, &node)| (stage, node as usize))
            .collect();
        Program { ops, outputs }
    }

    fn step(&self, state: u64, slots: &mut [bool]) -> u64 {
        for (i, op) in self.ops.iter().enumerate() {
            slots[i] = match *op {
                Op::Stage(s) => state >> s & 1 == 1,
                Op::Const(v) => v,
                Op::Copy(a) => slots[a],
                Op::Not(a) => !slots[a],
                Op::And(a, b) => slots[a] & slots[b],
                Op::Or(a, b) => slots[a] | slots[b],
                Op::Xor(a, b) => slots[a] ^ slots[b],
            };
        }
        self.outputs
            .iter()
            .fold(0, |acc, &(stage, node)| acc | u64::from(slots[node]) << stage)
    }
}
