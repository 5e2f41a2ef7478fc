//! Gate-level combinational netlists: bench-format parsing, topological
//! simulation, stuck-at faults and fault grading of functional test sets.

mod alu;
mod faults;
mod grading;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bits::Bits;

pub use alu::{generate_alu_netlist, MAX_ALU_WIDTH};
pub use faults::{enumerate_faults, fault_simulate, Fault, FaultSite};
pub use grading::{
    grade_test_set, CoverageReport, CoverageRow, DetectionMode, GradeError, COVERAGE_HEADER,
};

pub type NetId = usize;
pub type GateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown gate type `{kind}`")]
    UnknownGate { line: usize, kind: String },
    #[error("line {line}: gate {kind} cannot take {arity} inputs")]
    Arity {
        line: usize,
        kind: GateKind,
        arity: usize,
    },
    #[error("line {line}: net `{net}` is driven more than once")]
    DuplicateDriver { line: usize, net: String },
    #[error("line {line}: net `{net}` is never driven")]
    UndrivenNet { line: usize, net: String },
    #[error("line {line}: combinational cycle through net `{net}`")]
    Cycle { line: usize, net: String },
    #[error("expected {expected} input bits, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::And,
        GateKind::Or,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Buf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUF",
        }
    }

    fn accepts(self, arity: usize) -> bool {
        match self {
            GateKind::Not | GateKind::Buf => arity == 1,
            _ => arity >= 1,
        }
    }

    /// Evaluates the gate on 64 patterns at once.
    pub fn eval(self, inputs: impl Iterator<Item = u64>) -> u64 {
        match self {
            GateKind::And => inputs.fold(!0, |a, b| a & b),
            GateKind::Or => inputs.fold(0, |a, b| a | b),
            GateKind::Nand => !inputs.fold(!0, |a, b| a & b),
            GateKind::Nor => !inputs.fold(0, |a, b| a | b),
            GateKind::Xor => inputs.fold(0, |a, b| a ^ b),
            GateKind::Xnor => !inputs.fold(0, |a, b| a ^ b),
            GateKind::Not => !inputs.fold(0, |a, b| a | b),
            GateKind::Buf => inputs.fold(0, |a, b| a | b),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let upper = s.to_ascii_uppercase();
        if upper == "BUFF" {
            return Ok(GateKind::Buf);
        }
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == upper)
            .ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub output: NetId,
    pub inputs: Vec<NetId>,
}

/// Where a net's value is consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sink {
    GatePin { gate: GateId, pin: usize },
    Output { index: usize },
}

/// Validated acyclic combinational netlist.
#[derive(Debug, Clone)]
pub struct Netlist {
    names: Vec<String>,
    index: HashMap<String, NetId>,
    gates: Vec<Gate>,
    driver: Vec<Option<GateId>>,
    primary_inputs: Vec<NetId>,
    primary_outputs: Vec<NetId>,
    order: Vec<GateId>,
    sinks: Vec<Vec<Sink>>,
}

impl Netlist {
    pub fn net_count(&self) -> usize {
        self.names.len()
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id]
    }

    pub fn net_name(&self, net: NetId) -> &str {
        &self.names[net]
    }

    pub fn net_id(&self, name: &str) -> Option<NetId> {
        self.index.get(name).copied()
    }

    pub fn primary_inputs(&self) -> &[NetId] {
        &self.primary_inputs
    }

    pub fn primary_outputs(&self) -> &[NetId] {
        &self.primary_outputs
    }

    /// Gate driving `net`, or `None` for a primary input.
    pub fn driver(&self, net: NetId) -> Option<GateId> {
        self.driver[net]
    }

    /// Gates in a valid evaluation order.
    pub fn topological_order(&self) -> &[GateId] {
        &self.order
    }

    /// Gate pins and primary outputs reading `net`.
    pub fn sinks(&self, net: NetId) -> &[Sink] {
        &self.sinks[net]
    }

    pub fn fanout(&self, net: NetId) -> usize {
        self.sinks[net].len()
    }

    /// Bench-format text; gates are written in evaluation order.
    pub fn to_bench(&self) -> String {
        self.to_string()
    }

    fn check_width(&self, inputs: &Bits) -> Result<(), NetlistError> {
        if inputs.len() != self.primary_inputs.len() {
            return Err(NetlistError::WidthMismatch {
                expected: self.primary_inputs.len(),
                actual: inputs.len(),
            });
        }
        Ok(())
    }

    /// Simulates up to 64 patterns at once. `inputs[i]` carries primary
    /// input `i` with pattern `p` in bit `p`; the result is indexed by
    /// primary output the same way.
    pub fn simulate_words(&self, inputs: &[u64], fault: Option<&Fault>) -> Vec<u64> {
        assert_eq!(inputs.len(), self.primary_inputs.len(), "one word per primary input");
        let mut values = vec![0u64; self.names.len()];
        let stuck = |f: &Fault| if f.stuck_value { !0u64 } else { 0 };
        let stem = fault.filter(|f| f.site == FaultSite::Stem);
        for (net, v) in self.primary_inputs.iter().zip(inputs) {
            values[*net] = *v;
        }
        if let Some(f) = stem {
            if self.driver[f.net].is_none() {
                values[f.net] = stuck(f);
            }
        }
        for &g in &self.order {
            let gate = &self.gates[g];
            let pin_value = |pin: usize, net: NetId| match fault {
                Some(f) if f.site == (FaultSite::Branch { gate: g, pin }) => stuck(f),
                _ => values[net],
            };
            let v = gate
                .kind
                .eval(gate.inputs.iter().enumerate().map(|(pin, &n)| pin_value(pin, n)));
            values[gate.output] = match stem {
                Some(f) if f.net == gate.output => stuck(f),
                _ => v,
            };
        }
        self.primary_outputs
            .iter()
            .enumerate()
            .map(|(index, &net)| match fault {
                Some(f) if f.site == (FaultSite::Output { index }) => stuck(f),
                _ => values[net],
            })
            .collect()
    }

    fn simulate_bits(&self, inputs: &Bits, fault: Option<&Fault>) -> Result<Bits, NetlistError> {
        self.check_width(inputs)?;
        let words: Vec<u64> = inputs.iter().map(u64::from).collect();
        Ok(self
            .simulate_words(&words, fault)
            .into_iter()
            .map(|w| w & 1 == 1)
            .collect())
    }
}

impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &n in &self.primary_inputs {
            writeln!(f, "INPUT({})", self.names[n])?;
        }
        for &n in &self.primary_outputs {
            writeln!(f, "OUTPUT({})", self.names[n])?;
        }
        for &g in &self.order {
            let gate = &self.gates[g];
            let ins: Vec<&str> = gate.inputs.iter().map(|&n| self.names[n].as_str()).collect();
            writeln!(f, "{} = {}({})", self.names[gate.output], gate.kind, ins.join(", "))?;
        }
        Ok(())
    }
}

/// Fault-free evaluation of one input pattern.
pub fn good_simulate(n: &Netlist, inputs: &Bits) -> Result<Bits, NetlistError> {
    n.simulate_bits(inputs, None)
}

/// Incrementally assembles a netlist; [`NetlistBuilder::build`] validates it.
#[derive(Debug, Default, Clone)]
pub struct NetlistBuilder {
    names: Vec<String>,
    index: HashMap<String, NetId>,
    inputs: Vec<(NetId, usize)>,
    outputs: Vec<(NetId, usize)>,
    gates: Vec<(Gate, usize)>,
    /// First line mentioning each net, for error reporting.
    first_use: Vec<usize>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn net(&mut self, name: &str, line: usize) -> NetId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.first_use.push(line);
        id
    }

    pub fn input(&mut self, name: &str) -> NetId {
        self.input_at(name, 0)
    }

    pub fn output(&mut self, name: &str) -> NetId {
        self.output_at(name, 0)
    }

    pub fn gate(&mut self, kind: GateKind, output: &str, inputs: &[&str]) -> NetId {
        self.gate_at(kind, output, inputs, 0)
    }

    fn input_at(&mut self, name: &str, line: usize) -> NetId {
        let id = self.net(name, line);
        self.inputs.push((id, line));
        id
    }

    fn output_at(&mut self, name: &str, line: usize) -> NetId {
        let id = self.net(name, line);
        self.outputs.push((id, line));
        id
    }

    fn gate_at(&mut self, kind: GateKind, output: &str, inputs: &[&str], line: usize) -> NetId {
        let out = self.net(output, line);
        let ins = inputs.iter().map(|n| self.net(n, line)).collect();
        self.gates.push((
            Gate {
                kind,
                output: out,
                inputs: ins,
            },
            line,
        ));
        out
    }

    pub fn build(self) -> Result<Netlist, NetlistError> {
        let net_count = self.names.len();
        let mut driver: Vec<Option<GateId>> = vec![None; net_count];
        let mut is_input = vec![false; net_count];
        for &(net, line) in &self.inputs {
            if is_input[net] {
                return Err(NetlistError::DuplicateDriver {
                    line,
                    net: self.names[net].clone(),
                });
            }
            is_input[net] = true;
        }
        for (g, (gate, line)) in self.gates.iter().enumerate() {
            if !gate.kind.accepts(gate.inputs.len()) {
                return Err(NetlistError::Arity {
                    line: *line,
                    kind: gate.kind,
                    arity: gate.inputs.len(),
                });
            }
            if is_input[gate.output] || driver[gate.output].is_some() {
                return Err(NetlistError::DuplicateDriver {
                    line: *line,
                    net: self.names[gate.output].clone(),
                });
            }
            driver[gate.output] = Some(g);
        }
        for net in 0..net_count {
            if !is_input[net] && driver[net].is_none() {
                return Err(NetlistError::UndrivenNet {
                    line: self.first_use[net],
                    net: self.names[net].clone(),
                });
            }
        }

        let gates: Vec<Gate> = self.gates.iter().map(|(g, _)| g.clone()).collect();
        let mut sinks: Vec<Vec<Sink>> = vec![Vec::new(); net_count];
        for (g, gate) in gates.iter().enumerate() {
            for (pin, &n) in gate.inputs.iter().enumerate() {
                sinks[n].push(Sink::GatePin { gate: g, pin });
            }
        }
        for (index, &(n, _)) in self.outputs.iter().enumerate() {
            sinks[n].push(Sink::Output { index });
        }

        // Kahn's algorithm; ties resolved by gate index for a stable order.
        let mut pending: Vec<usize> = gates
            .iter()
            .map(|g| g.inputs.iter().filter(|&&n| driver[n].is_some()).count())
            .collect();
        let mut ready: std::collections::BTreeSet<GateId> =
            (0..gates.len()).filter(|&g| pending[g] == 0).collect();
        let mut order = Vec::with_capacity(gates.len());
        while let Some(g) = ready.pop_first() {
            order.push(g);
            for sink in &sinks[gates[g].output] {
                if let Sink::GatePin { gate, .. } = *sink {
                    pending[gate] -= 1;
                    if pending[gate] == 0 {
                        ready.insert(gate);
                    }
                }
            }
        }
        if order.len() != gates.len() {
            let (stuck, line) = self
                .gates
                .iter()
                .enumerate()
                .find(|(g, _)| pending[*g] > 0)
                .map(|(_, (gate, line))| (gate.output, *line))
                .expect("some gate left unordered");
            return Err(NetlistError::Cycle {
                line,
                net: self.names[stuck].clone(),
            });
        }

        Ok(Netlist {
            names: self.names,
            index: self.index,
            gates,
            driver,
            primary_inputs: self.inputs.into_iter().map(|(n, _)| n).collect(),
            primary_outputs: self.outputs.into_iter().map(|(n, _)| n).collect(),
            order,
            sinks,
        })
    }
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Cursor<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> NetlistError {
        NetlistError::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn done(&mut self) -> bool {
        self.skip_ws();
        self.rest.is_empty()
    }

    fn name(&mut self) -> Result<&'a str, NetlistError> {
        self.skip_ws();
        let end = self.rest.find(|c: char| !is_name_char(c)).unwrap_or(self.rest.len());
        if end == 0 {
            return Err(self.err(format!("expected a name at `{}`", self.rest)));
        }
        let (name, rest) = self.rest.split_at(end);
        self.rest = rest;
        Ok(name)
    }

    fn expect(&mut self, c: char) -> Result<(), NetlistError> {
        self.skip_ws();
        match self.rest.strip_prefix(c) {
            Some(rest) => {
                self.rest = rest;
                Ok(())
            }
            None => Err(self.err(format!("expected `{c}` at `{}`", self.rest))),
        }
    }

    fn peek(&mut self, c: char) -> bool {
        self.skip_ws();
        self.rest.starts_with(c)
    }
}

/// Parses bench-format text: `INPUT(n)`, `OUTPUT(n)`, `n = TYPE(a, b, ...)`
/// and `#` comments. Several statements may share a line.
pub fn parse_netlist(text: &str) -> Result<Netlist, NetlistError> {
    let mut builder = NetlistBuilder::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut cur = Cursor {
            rest: content,
            line,
        };
        while !cur.done() {
            let head = cur.name()?;
            if cur.peek('=') {
                cur.expect('=')?;
                let kind_name = cur.name()?;
                let kind: GateKind = kind_name.parse().map_err(|_| NetlistError::UnknownGate {
                    line,
                    kind: kind_name.to_string(),
                })?;
                cur.expect('(')?;
                let mut inputs = vec![cur.name()?];
                while cur.peek(',') {
                    cur.expect(',')?;
                    inputs.push(cur.name()?);
                }
                cur.expect(')')?;
                builder.gate_at(kind, head, &inputs, line);
            } else {
                cur.expect('(')?;
                let net = cur.name()?;
                cur.expect(')')?;
                match head.to_ascii_uppercase().as_str() {
                    "INPUT" => builder.input_at(net, line),
                    "OUTPUT" => builder.output_at(net, line),
                    _ => return Err(cur.err(format!("unknown declaration `{head}`"))),
                };
            }
        }
    }
    builder.build()
}

impl FromStr for Netlist {
    type Err = NetlistError;

    fn from_str(s: &str) -> Result<Self, NetlistError> {
        parse_netlist(s)
    }
}
