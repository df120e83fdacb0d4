// SPDX-License-Identifier: Apache-2.0

//! Combinational gate-level netlists.
//!
//! A [`Circuit`] is an immutable, validated DAG: every net has at most one
//! driver (a primary input or a gate output), every gate input and every
//! primary output is driven, and the gate graph is acyclic. Circuits are
//! assembled with a [`CircuitBuilder`], which accepts definitions in any order
//! and resolves names when [`CircuitBuilder::build`] is called.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Index of a net (a named signal) inside a [`Circuit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(pub u32);

impl NetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a gate inside a [`Circuit`]; gates are numbered in definition order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GateId(pub u32);

impl GateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Supported combinational primitives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateKind {
    And,
    Or,
    Nand,
    Nor,
    Not,
    Buf,
    Xor,
    Xnor,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::And,
        GateKind::Or,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Not,
        GateKind::Buf,
        GateKind::Xor,
        GateKind::Xnor,
    ];

    /// Dense index in `0..8`, matching the order of [`GateKind::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// Canonical upper-case keyword.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUF",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
        }
    }

    /// Case-insensitive keyword lookup. `BUFF` is accepted as an alias of `BUF`.
    pub fn from_name(name: &str) -> Option<GateKind> {
        let known = [
            ("AND", GateKind::And),
            ("OR", GateKind::Or),
            ("NAND", GateKind::Nand),
            ("NOR", GateKind::Nor),
            ("NOT", GateKind::Not),
            ("INV", GateKind::Not),
            ("BUF", GateKind::Buf),
            ("BUFF", GateKind::Buf),
            ("XOR", GateKind::Xor),
            ("XNOR", GateKind::Xnor),
        ];
        known
            .iter()
            .find(|(kw, _)| kw.eq_ignore_ascii_case(name))
            .map(|&(_, kind)| kind)
    }

    /// Whether the gate's output is the complement of its base function.
    pub fn is_inverting(self) -> bool {
        matches!(self, GateKind::Nand | GateKind::Nor | GateKind::Not | GateKind::Xnor)
    }

    /// NOT and BUF take exactly one input; every other kind takes two or more.
    pub fn accepts_arity(self, arity: usize) -> bool {
        match self {
            GateKind::Not | GateKind::Buf => arity == 1,
            _ => arity >= 2,
        }
    }

    /// Evaluates the gate on 64 independent input patterns at once.
    pub fn eval_words<I: IntoIterator<Item = u64>>(self, inputs: I) -> u64 {
        let mut it = inputs.into_iter();
        let first = it.next().unwrap_or(0);
        let base = match self {
            GateKind::And | GateKind::Nand => it.fold(first, |acc, w| acc & w),
            GateKind::Or | GateKind::Nor => it.fold(first, |acc, w| acc | w),
            GateKind::Xor | GateKind::Xnor => it.fold(first, |acc, w| acc ^ w),
            GateKind::Not | GateKind::Buf => first,
        };
        if self.is_inverting() {
            !base
        } else {
            base
        }
    }

    /// Evaluates the gate on a single input pattern.
    pub fn eval<I: IntoIterator<Item = bool>>(self, inputs: I) -> bool {
        self.eval_words(inputs.into_iter().map(|b| if b { !0u64 } else { 0 })) & 1 == 1
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate instance: a primitive driving one net from an ordered list of nets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub id: GateId,
    pub kind: GateKind,
    pub fanin: Vec<NetId>,
    pub output: NetId,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetlistError {
    #[error("undefined signal `{0}`")]
    UndefinedSignal(String),
    #[error("net `{0}` has more than one driver")]
    MultipleDrivers(String),
    #[error("combinational cycle through net `{0}`")]
    Cycle(String),
    #[error("{kind} gate driving `{net}` cannot take {arity} input(s)")]
    Arity { kind: GateKind, net: String, arity: usize },
    #[error("net `{0}` is declared as an output more than once")]
    DuplicateOutput(String),
    #[error("gate id {0} is out of range")]
    InvalidGate(u32),
}

/// The forward cone of a gate: everything a transient on its output can reach.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cone {
    /// Gates with at least one input on a path from the source, in topological order.
    pub gates: Vec<GateId>,
    /// Primary outputs reached by the source, in primary-output order.
    pub outputs: Vec<NetId>,
}

/// An immutable, validated, levelized combinational circuit.
#[derive(Debug, Clone)]
pub struct Circuit {
    nets: Vec<String>,
    gates: Vec<Gate>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    driver: Vec<Option<GateId>>,
    fanout: Vec<Vec<GateId>>,
    output_slot: Vec<Option<u32>>,
    topo: Vec<GateId>,
    topo_pos: Vec<u32>,
    levels: Vec<u32>,
    max_level: u32,
}

impl Circuit {
    pub fn nets(&self) -> &[String] {
        &self.nets
    }

    pub fn num_nets(&self) -> usize {
        self.nets.len()
    }

    pub fn net_name(&self, net: NetId) -> &str {
        &self.nets[net.index()]
    }

    pub fn find_net(&self, name: &str) -> Option<NetId> {
        self.nets.iter().position(|n| n == name).map(|i| NetId(i as u32))
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id.index()]
    }

    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn inputs(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NetId] {
        &self.outputs
    }

    /// The gate driving `net`, or `None` for primary inputs.
    pub fn driver(&self, net: NetId) -> Option<GateId> {
        self.driver[net.index()]
    }

    /// Gates reading `net`.
    pub fn fanout(&self, net: NetId) -> &[GateId] {
        &self.fanout[net.index()]
    }

    /// Position of `net` in the primary-output list, if it is an output.
    pub fn output_slot(&self, net: NetId) -> Option<usize> {
        self.output_slot[net.index()].map(|s| s as usize)
    }

    pub fn is_output(&self, net: NetId) -> bool {
        self.output_slot[net.index()].is_some()
    }

    /// Gates ordered so that every gate follows the drivers of its inputs.
    pub fn topological_order(&self) -> &[GateId] {
        &self.topo
    }

    /// Position of `gate` within [`Circuit::topological_order`].
    pub fn topo_position(&self, gate: GateId) -> usize {
        self.topo_pos[gate.index()] as usize
    }

    /// Logic level of a gate: one more than the deepest driver of its inputs.
    pub fn level(&self, gate: GateId) -> u32 {
        self.levels[gate.index()]
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// Depth of the circuit (LvMax); 0 for a circuit without gates.
    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    /// Forward traversal from the output of `gate`.
    pub fn transitive_fanout(&self, gate: GateId) -> Result<Cone, NetlistError> {
        let src = self.gates.get(gate.index()).ok_or(NetlistError::InvalidGate(gate.0))?;
        let mut seen = vec![false; self.gates.len()];
        let mut queue = VecDeque::new();
        let mut gates = Vec::new();
        queue.push_back(src.output);
        while let Some(net) = queue.pop_front() {
            for &g in self.fanout(net) {
                if !seen[g.index()] {
                    seen[g.index()] = true;
                    gates.push(g);
                    queue.push_back(self.gates[g.index()].output);
                }
            }
        }
        gates.sort_by_key(|g| self.topo_pos[g.index()]);
        let mut slots: Vec<u32> = core::iter::once(src.output)
            .chain(gates.iter().map(|g| self.gates[g.index()].output))
            .filter_map(|n| self.output_slot[n.index()])
            .collect();
        slots.sort_unstable();
        let outputs = slots.into_iter().map(|s| self.outputs[s as usize]).collect();
        Ok(Cone { gates, outputs })
    }
}

/// Computes gate levels from scratch: primary inputs sit at level 0 and each
/// gate sits one above its deepest input driver. Returns `(levels, max_level)`.
pub fn levelize(circuit: &Circuit) -> (Vec<u32>, u32) {
    let mut net_level = vec![0u32; circuit.num_nets()];
    let mut levels = vec![0u32; circuit.num_gates()];
    for &g in circuit.topological_order() {
        let gate = circuit.gate(g);
        let lvl = 1 + gate.fanin.iter().map(|n| net_level[n.index()]).max().unwrap_or(0);
        levels[g.index()] = lvl;
        net_level[gate.output.index()] = lvl;
    }
    let max = levels.iter().copied().max().unwrap_or(0);
    (levels, max)
}

/// Incremental constructor for [`Circuit`].
#[derive(Debug, Default, Clone)]
pub struct CircuitBuilder {
    names: BTreeMap<String, NetId>,
    nets: Vec<String>,
    is_input: Vec<bool>,
    driver: Vec<Option<GateId>>,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, name: &str) -> NetId {
        if let Some(&id) = self.names.get(name) {
            return id;
        }
        let id = NetId(self.nets.len() as u32);
        self.names.insert(name.to_string(), id);
        self.nets.push(name.to_string());
        self.is_input.push(false);
        self.driver.push(None);
        id
    }

    fn is_driven(&self, net: NetId) -> bool {
        self.is_input[net.index()] || self.driver[net.index()].is_some()
    }

    pub fn add_input(&mut self, name: &str) -> Result<NetId, NetlistError> {
        let id = self.intern(name);
        if self.is_driven(id) {
            return Err(NetlistError::MultipleDrivers(name.to_string()));
        }
        self.is_input[id.index()] = true;
        self.inputs.push(id);
        Ok(id)
    }

    pub fn add_output(&mut self, name: &str) -> Result<NetId, NetlistError> {
        let id = self.intern(name);
        if self.outputs.contains(&id) {
            return Err(NetlistError::DuplicateOutput(name.to_string()));
        }
        self.outputs.push(id);
        Ok(id)
    }

    pub fn add_gate(&mut self, kind: GateKind, output: &str, inputs: &[&str]) -> Result<GateId, NetlistError> {
        if !kind.accepts_arity(inputs.len()) {
            return Err(NetlistError::Arity {
                kind,
                net: output.to_string(),
                arity: inputs.len(),
            });
        }
        let out = self.intern(output);
        if self.is_driven(out) {
            return Err(NetlistError::MultipleDrivers(output.to_string()));
        }
        let fanin = inputs.iter().map(|n| self.intern(n)).collect();
        let id = GateId(self.gates.len() as u32);
        self.driver[out.index()] = Some(id);
        self.gates.push(Gate {
            id,
            kind,
            fanin,
            output: out,
        });
        Ok(id)
    }

    pub fn build(self) -> Result<Circuit, NetlistError> {
        let CircuitBuilder {
            nets,
            is_input,
            driver,
            inputs,
            outputs,
            gates,
            ..
        } = self;
        let driven = |n: NetId| is_input[n.index()] || driver[n.index()].is_some();
        for gate in &gates {
            if let Some(&n) = gate.fanin.iter().find(|&&n| !driven(n)) {
                return Err(NetlistError::UndefinedSignal(nets[n.index()].clone()));
            }
        }
        if let Some(&n) = outputs.iter().find(|&&n| !driven(n)) {
            return Err(NetlistError::UndefinedSignal(nets[n.index()].clone()));
        }

        let mut fanout = vec![Vec::new(); nets.len()];
        for gate in &gates {
            for &n in &gate.fanin {
                // A gate listing the same net twice still reads it once.
                let list: &mut Vec<GateId> = &mut fanout[n.index()];
                if list.last() != Some(&gate.id) {
                    list.push(gate.id);
                }
            }
        }

        // Kahn's algorithm over gates; FIFO keeps the order close to file order.
        let mut pending: Vec<usize> = gates
            .iter()
            .map(|g| {
                let mut srcs: Vec<NetId> = g
                    .fanin
                    .iter()
                    .copied()
                    .filter(|n| driver[n.index()].is_some())
                    .collect();
                srcs.sort_unstable();
                srcs.dedup();
                srcs.len()
            })
            .collect();
        let mut ready: VecDeque<GateId> = gates
            .iter()
            .filter(|g| pending[g.id.index()] == 0)
            .map(|g| g.id)
            .collect();
        let mut topo = Vec::with_capacity(gates.len());
        while let Some(g) = ready.pop_front() {
            topo.push(g);
            for &succ in &fanout[gates[g.index()].output.index()] {
                pending[succ.index()] -= 1;
                if pending[succ.index()] == 0 {
                    ready.push_back(succ);
                }
            }
        }
        if topo.len() != gates.len() {
            let stuck = gates
                .iter()
                .find(|g| pending[g.id.index()] > 0)
                .expect("a gate is left over");
            return Err(NetlistError::Cycle(nets[stuck.output.index()].clone()));
        }

        let mut topo_pos = vec![0u32; gates.len()];
        for (pos, g) in topo.iter().enumerate() {
            topo_pos[g.index()] = pos as u32;
        }
        let mut output_slot = vec![None; nets.len()];
        for (slot, n) in outputs.iter().enumerate() {
            output_slot[n.index()] = Some(slot as u32);
        }

        let mut circuit = Circuit {
            nets,
            gates,
            inputs,
            outputs,
            driver,
            fanout,
            output_slot,
            topo,
            topo_pos,
            levels: Vec::new(),
            max_level: 0,
        };
        let (levels, max_level) = levelize(&circuit);
        circuit.levels = levels;
        circuit.max_level = max_level;
        Ok(circuit)
    }
}
