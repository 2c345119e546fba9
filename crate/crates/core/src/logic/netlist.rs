use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::LogicError;

pub type NodeId = u32;

/// One netlist node. Operands always refer to earlier nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Gate {
    Input { stage: usize },
    Const { value: bool },
    Buf { a: NodeId },
    Not { a: NodeId },
    And { a: NodeId, b: NodeId },
    Or { a: NodeId, b: NodeId },
    Xor { a: NodeId, b: NodeId },
}

impl Gate {
    fn operands(&self) -> (Option<NodeId>, Option<NodeId>) {
        match *self {
            Gate::Input { .. } | Gate::Const { .. } => (None, None),
            Gate::Buf { a } | Gate::Not { a } => (Some(a), None),
            Gate::And { a, b } | Gate::Or { a, b } | Gate::Xor { a, b } => (Some(a), Some(b)),
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, Gate::And { .. } | Gate::Or { .. } | Gate::Xor { .. })
    }
}

/// A technology-independent combinational circuit with one output per
/// target stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawNetlist")]
pub struct Netlist {
    inputs: Vec<usize>,
    nodes: Vec<Gate>,
    outputs: BTreeMap<usize, NodeId>,
}

#[derive(Deserialize)]
struct RawNetlist {
    inputs: Vec<usize>,
    nodes: Vec<Gate>,
    outputs: BTreeMap<usize, NodeId>,
}

impl TryFrom<RawNetlist> for Netlist {
    type Error = LogicError;

    fn try_from(raw: RawNetlist) -> Result<Self, Self::Error> {
        Netlist::new(raw.inputs, raw.nodes, raw.outputs)
    }
}

impl Netlist {
    pub fn new(
        inputs: Vec<usize>,
        nodes: Vec<Gate>,
        outputs: BTreeMap<usize, NodeId>,
    ) -> Result<Self, LogicError> {
        let mut declared = std::collections::BTreeSet::new();
        for &stage in &inputs {
            if !declared.insert(stage) {
                return Err(LogicError::DuplicateSupport { stage });
            }
        }
        for (id, gate) in nodes.iter().enumerate() {
            let (a, b) = gate.operands();
            for operand in [a, b].into_iter().flatten() {
                if operand as usize >= id {
                    return Err(LogicError::MalformedNetlist(format!(
                        "node {id} reads node {operand}, which does not precede it"
                    )));
                }
            }
            if let Gate::Input { stage } = gate {
                if !declared.contains(stage) {
                    return Err(LogicError::MalformedNetlist(format!(
                        "node {id} reads undeclared input x{stage}"
                    )));
                }
            }
        }
        for (&stage, &node) in &outputs {
            if node as usize >= nodes.len() {
                return Err(LogicError::MalformedNetlist(format!(
                    "output f{stage} refers to missing node {node}"
                )));
            }
        }
        Ok(Netlist {
            inputs,
            nodes,
            outputs,
        })
    }

    /// Stage indices read by the circuit, in evaluation order.
    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn nodes(&self) -> &[Gate] {
        &self.nodes
    }

    pub fn outputs(&self) -> &BTreeMap<usize, NodeId> {
        &self.outputs
    }

    fn reachable(&self) -> Vec<bool> {
        let mut live = vec![false; self.nodes.len()];
        for &node in self.outputs.values() {
            live[node as usize] = true;
        }
        for id in (0..self.nodes.len()).rev() {
            if live[id] {
                let (a, b) = self.nodes[id].operands();
                for operand in [a, b].into_iter().flatten() {
                    live[operand as usize] = true;
                }
            }
        }
        live
    }

    /// Two-input gates (AND/OR/XOR) that some output depends on. Inverters,
    /// buffers and constants are free.
    pub fn gate_count(&self) -> usize {
        self.reachable()
            .iter()
            .zip(&self.nodes)
            .filter(|(live, gate)| **live && gate.is_binary())
            .count()
    }

    /// Every live node other than primary inputs, inverters included.
    pub fn node_count(&self) -> usize {
        self.reachable()
            .iter()
            .zip(&self.nodes)
            .filter(|(live, gate)| **live && !matches!(gate, Gate::Input { .. }))
            .count()
    }

    /// Longest chain of two-input gates from an input to an output.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.nodes.len()];
        for (id, gate) in self.nodes.iter().enumerate() {
            let (a, b) = gate.operands();
            let below = [a, b]
                .into_iter()
                .flatten()
                .map(|x| level[x as usize])
                .max()
                .unwrap_or(0);
            level[id] = below + usize::from(gate.is_binary());
        }
        self.outputs
            .values()
            .map(|&n| level[n as usize])
            .max()
            .unwrap_or(0)
    }

    /// Evaluates the circuit; `values[i]` is the value of stage `inputs()[i]`.
    /// Returns one bit per output, in ascending stage order.
    pub fn evaluate(&self, values: &[bool]) -> Result<Vec<bool>, LogicError> {
        let words: Vec<u64> = values.iter().map(|&v| if v { 1 } else { 0 }).collect();
        Ok(self
            .evaluate_words(&words)?
            .into_iter()
            .map(|w| w & 1 == 1)
            .collect())
    }

    /// Bit-parallel evaluation of 64 input points at once.
    pub fn evaluate_words(&self, values: &[u64]) -> Result<Vec<u64>, LogicError> {
        let slots = self.node_values(values)?;
        Ok(self.outputs.values().map(|&n| slots[n as usize]).collect())
    }

    pub(crate) fn node_values(&self, values: &[u64]) -> Result<Vec<u64>, LogicError> {
        if values.len() != self.inputs.len() {
            return Err(LogicError::WidthMismatch {
                expected: self.inputs.len(),
                found: values.len(),
            });
        }
        let position: HashMap<usize, usize> = self
            .inputs
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i))
            .collect();
        let mut slots = vec![0u64; self.nodes.len()];
        for (id, gate) in self.nodes.iter().enumerate() {
            slots[id] = match *gate {
                Gate::Input { stage } => values[position[&stage]],
                Gate::Const { value } => {
                    if value {
                        u64::MAX
                    } else {
                        0
                    }
                }
                Gate::Buf { a } => slots[a as usize],
                Gate::Not { a } => !slots[a as usize],
                Gate::And { a, b } => slots[a as usize] & slots[b as usize],
                Gate::Or { a, b } => slots[a as usize] | slots[b as usize],
                Gate::Xor { a, b } => slots[a as usize] ^ slots[b as usize],
            };
        }
        Ok(slots)
    }

    /// Drops nodes no output depends on, keeping relative order.
    pub fn swept(&self) -> Netlist {
        let live = self.reachable();
        let mut remap = vec![u32::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (id, gate) in self.nodes.iter().enumerate() {
            if !live[id] {
                continue;
            }
            let r = |x: NodeId| remap[x as usize];
            let mapped = match *gate {
                Gate::Buf { a } => Gate::Buf { a: r(a) },
                Gate::Not { a } => Gate::Not { a: r(a) },
                Gate::And { a, b } => Gate::And { a: r(a), b: r(b) },
                Gate::Or { a, b } => Gate::Or { a: r(a), b: r(b) },
                Gate::Xor { a, b } => Gate::Xor { a: r(a), b: r(b) },
                other => other,
            };
            remap[id] = nodes.len() as NodeId;
            nodes.push(mapped);
        }
        Netlist {
            inputs: self.inputs.clone(),
            nodes,
            outputs: self
                .outputs
                .iter()
                .map(|(&s, &n)| (s, remap[n as usize]))
                .collect(),
        }
    }

    /// Structural text: one assignment per line with operators `& | ^ ~`.
    ///
    /// Two-input gates and buffers get a line each in node order; a gate that
    /// drives outputs is named after the lowest such stage (`f5`), others are
    /// `n<id>`. Outputs not named by a gate line follow in stage order.
    pub fn to_structural_text(&self) -> String {
        let net = self.swept();
        let mut names: Vec<Option<String>> = vec![None; net.nodes.len()];
        for (&stage, &node) in net.outputs.iter() {
            let gate = net.nodes[node as usize];
            if names[node as usize].is_none()
                && (gate.is_binary() || matches!(gate, Gate::Buf { .. }))
            {
                names[node as usize] = Some(format!("f{stage}"));
            }
        }
        for (id, gate) in net.nodes.iter().enumerate() {
            if names[id].is_none() && (gate.is_binary() || matches!(gate, Gate::Buf { .. })) {
                names[id] = Some(format!("n{id}"));
            }
        }
        fn operand(net: &Netlist, names: &[Option<String>], id: NodeId) -> String {
            match net.nodes[id as usize] {
                Gate::Input { stage } => format!("x{stage}"),
                Gate::Const { value } => (if value { "1" } else { "0" }).to_string(),
                Gate::Not { a } => format!("~{}", operand(net, names, a)),
                _ => names[id as usize].clone().unwrap_or_default(),
            }
        }
        let mut out = String::new();
        for (id, gate) in net.nodes.iter().enumerate() {
            let name = match &names[id] {
                Some(name) => name,
                None => continue,
            };
            let rhs = match *gate {
                Gate::Buf { a } => operand(&net, &names, a),
                Gate::And { a, b } => {
                    format!("{} & {}", operand(&net, &names, a), operand(&net, &names, b))
                }
                Gate::Or { a, b } => {
                    format!("{} | {}", operand(&net, &names, a), operand(&net, &names, b))
                }
                Gate::Xor { a, b } => {
                    format!("{} ^ {}", operand(&net, &names, a), operand(&net, &names, b))
                }
                _ => unreachable!("only gates and buffers are named"),
            };
            let _ = writeln!(out, "{name} = {rhs}");
        }
        for (&stage, &node) in net.outputs.iter() {
            let own = format!("f{stage}");
            if names[node as usize].as_deref() != Some(own.as_str()) {
                let _ = writeln!(out, "{own} = {}", operand(&net, &names, node));
            }
        }
        out
    }
}

/// Incremental netlist construction with structural hashing and local
/// simplification (constants, idempotence, complements, inverter pushing
/// through XOR).
#[derive(Debug, Default, Clone)]
pub struct NetlistBuilder {
    inputs: Vec<usize>,
    nodes: Vec<Gate>,
    table: HashMap<Gate, NodeId>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// A builder whose declared inputs are exactly `stages`, in that order.
    pub fn with_inputs(stages: &[usize]) -> Self {
        let mut builder = Self::new();
        for &stage in stages {
            builder.input(stage);
        }
        builder
    }

    fn intern(&mut self, gate: Gate) -> NodeId {
        if let Some(&id) = self.table.get(&gate) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(gate);
        self.table.insert(gate, id);
        id
    }

    pub fn input(&mut self, stage: usize) -> NodeId {
        if !self.inputs.contains(&stage) {
            self.inputs.push(stage);
        }
        self.intern(Gate::Input { stage })
    }

    pub fn constant(&mut self, value: bool) -> NodeId {
        self.intern(Gate::Const { value })
    }

    fn const_of(&self, id: NodeId) -> Option<bool> {
        match self.nodes[id as usize] {
            Gate::Const { value } => Some(value),
            _ => None,
        }
    }

    fn inverse_of(&self, id: NodeId) -> Option<NodeId> {
        match self.nodes[id as usize] {
            Gate::Not { a } => Some(a),
            _ => None,
        }
    }

    fn complementary(&self, a: NodeId, b: NodeId) -> bool {
        self.inverse_of(a) == Some(b) || self.inverse_of(b) == Some(a)
    }

    pub fn not(&mut self, a: NodeId) -> NodeId {
        if let Some(inner) = self.inverse_of(a) {
            return inner;
        }
        if let Some(v) = self.const_of(a) {
            return self.constant(!v);
        }
        self.intern(Gate::Not { a })
    }

    pub fn buf(&mut self, a: NodeId) -> NodeId {
        self.intern(Gate::Buf { a })
    }

    pub fn and(&mut self, a: NodeId, b: NodeId) -> NodeId {
        match (self.const_of(a), self.const_of(b)) {
            (Some(false), _) | (_, Some(false)) => return self.constant(false),
            (Some(true), _) => return b,
            (_, Some(true)) => return a,
            _ => {}
        }
        if a == b {
            return a;
        }
        if self.complementary(a, b) {
            return self.constant(false);
        }
        let (a, b) = (a.min(b), a.max(b));
        self.intern(Gate::And { a, b })
    }

    pub fn or(&mut self, a: NodeId, b: NodeId) -> NodeId {
        match (self.const_of(a), self.const_of(b)) {
            (Some(true), _) | (_, Some(true)) => return self.constant(true),
            (Some(false), _) => return b,
            (_, Some(false)) => return a,
            _ => {}
        }
        if a == b {
            return a;
        }
        if self.complementary(a, b) {
            return self.constant(true);
        }
        let (a, b) = (a.min(b), a.max(b));
        self.intern(Gate::Or { a, b })
    }

    pub fn xor(&mut self, a: NodeId, b: NodeId) -> NodeId {
        match (self.const_of(a), self.const_of(b)) {
            (Some(x), Some(y)) => return self.constant(x ^ y),
            (Some(false), _) => return b,
            (_, Some(false)) => return a,
            (Some(true), _) => return self.not(b),
            (_, Some(true)) => return self.not(a),
            _ => {}
        }
        if a == b {
            return self.constant(false);
        }
        if self.complementary(a, b) {
            return self.constant(true);
        }
        if let Some(inner) = self.inverse_of(a) {
            let x = self.xor(inner, b);
            return self.not(x);
        }
        if let Some(inner) = self.inverse_of(b) {
            let x = self.xor(a, inner);
            return self.not(x);
        }
        let (a, b) = (a.min(b), a.max(b));
        self.intern(Gate::Xor { a, b })
    }

    /// AND over all operands (constant 1 when empty).
    pub fn and_all(&mut self, operands: &[NodeId]) -> NodeId {
        let mut acc = self.constant(true);
        for &x in operands {
            acc = self.and(acc, x);
        }
        acc
    }

    /// OR over all operands (constant 0 when empty).
    pub fn or_all(&mut self, operands: &[NodeId]) -> NodeId {
        let mut acc = self.constant(false);
        for &x in operands {
            acc = self.or(acc, x);
        }
        acc
    }

    pub fn xor_all(&mut self, operands: &[NodeId]) -> NodeId {
        let mut acc = self.constant(false);
        for &x in operands {
            acc = self.xor(acc, x);
        }
        acc
    }

    /// Finishes the netlist, dropping nodes no output uses.
    pub fn finish(self, outputs: BTreeMap<usize, NodeId>) -> Netlist {
        Netlist {
            inputs: self.inputs,
            nodes: self.nodes,
            outputs,
        }
        .swept()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_net() -> Netlist {
        let mut b = NetlistBuilder::new();
        let x0 = b.input(0);
        let x1 = b.input(1);
        let f = b.xor(x0, x1);
        b.finish([(0, f)].into())
    }

    #[test]
    fn evaluates_xor() {
        let net = xor_net();
        assert_eq!(net.evaluate(&[true, false]).unwrap(), vec![true]);
        assert_eq!(net.evaluate(&[true, true]).unwrap(), vec![false]);
        assert_eq!(
            net.evaluate(&[true]),
            Err(LogicError::WidthMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn constant_output() {
        let mut b = NetlistBuilder::with_inputs(&[0, 1]);
        let one = b.constant(true);
        let net = b.finish([(3, one)].into());
        assert_eq!(net.evaluate(&[false, true]).unwrap(), vec![true]);
        assert_eq!(net.gate_count(), 0);
    }

    #[test]
    fn builder_simplifies() {
        let mut b = NetlistBuilder::new();
        let x = b.input(0);
        let y = b.input(1);
        let nx = b.not(x);
        assert_eq!(b.not(nx), x);
        let zero = b.constant(false);
        assert_eq!(b.and(x, nx), zero);
        assert_eq!(b.and(x, x), x);
        let g1 = b.and(x, y);
        let g2 = b.and(y, x);
        assert_eq!(g1, g2);
        let ny = b.not(y);
        let p = b.xor(nx, ny);
        let q = b.xor(x, y);
        assert_eq!(p, q);
        let r = b.xor(nx, y);
        assert_eq!(b.not(r), q);
    }

    #[test]
    fn gate_count_ignores_dead_and_free_nodes() {
        let mut b = NetlistBuilder::new();
        let x = b.input(0);
        let y = b.input(1);
        let dead = b.and(x, y);
        let nx = b.not(x);
        let f = b.or(nx, y);
        let net = Netlist {
            inputs: b.inputs.clone(),
            nodes: b.nodes.clone(),
            outputs: [(0, f), (1, nx)].into(),
        };
        assert_eq!(net.gate_count(), 1);
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.swept().nodes().len(), 4);
        let _ = dead;
    }

    #[test]
    fn rejects_forward_references() {
        let nodes = vec![Gate::Not { a: 1 }, Gate::Input { stage: 0 }];
        assert!(Netlist::new(vec![0], nodes, BTreeMap::new()).is_err());
        let nodes = vec![Gate::Input { stage: 2 }];
        assert!(Netlist::new(vec![0], nodes, BTreeMap::new()).is_err());
        let nodes = vec![Gate::Input { stage: 0 }];
        assert!(Netlist::new(vec![0], nodes, [(0, 5)].into()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let net = xor_net();
        let text = serde_json::to_string(&net).unwrap();
        let back: Netlist = serde_json::from_str(&text).unwrap();
        assert_eq!(back, net);
        let bad = text.replace("\"b\":1", "\"b\":7");
        assert!(serde_json::from_str::<Netlist>(&bad).is_err());
    }

    #[test]
    fn structural_text_names_outputs() {
        let mut b = NetlistBuilder::new();
        let x2 = b.input(2);
        let x3 = b.input(3);
        let x5 = b.input(5);
        let g = b.xor(x2, x3);
        let ng = b.not(g);
        let f0 = b.and(ng, x5);
        let net = b.finish([(0, f0), (4, x5), (5, g), (6, ng)].into());
        let text = net.to_structural_text();
        assert_eq!(
            text,
            "f5 = x2 ^ x3\nf0 = x5 & ~f5\nf4 = x5\nf6 = ~f5\n"
        );
    }

    #[test]
    fn depth_counts_binary_levels() {
        let mut b = NetlistBuilder::new();
        let x: Vec<NodeId> = (0..4).map(|s| b.input(s)).collect();
        let a = b.and(x[0], x[1]);
        let na = b.not(a);
        let o = b.or(na, x[2]);
        let net = b.finish([(0, o), (1, x[3])].into());
        assert_eq!(net.depth(), 2);
    }
}
