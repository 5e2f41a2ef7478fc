use std::fmt;

use crate::bits::Bits;

use super::{GateKind, NetId, Netlist, NetlistError, Sink};

/// Location of a stuck-at fault on a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaultSite {
    /// The net itself, affecting every reader.
    Stem,
    /// One fanout branch feeding a gate pin.
    Branch { gate: usize, pin: usize },
    /// The fanout branch observed at a primary output.
    Output { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fault {
    pub net: NetId,
    pub stuck_value: bool,
    pub site: FaultSite,
}

impl Fault {
    pub fn stem(net: NetId, stuck_value: bool) -> Self {
        Fault {
            net,
            stuck_value,
            site: FaultSite::Stem,
        }
    }

    /// Human-readable name such as `n12/sa0` or `n12>g3.1/sa1`.
    pub fn describe(&self, n: &Netlist) -> String {
        let net = n.net_name(self.net);
        let v = self.stuck_value as u8;
        match self.site {
            FaultSite::Stem => format!("{net}/sa{v}"),
            FaultSite::Branch { gate, pin } => {
                format!("{net}>{}.{pin}/sa{v}", n.net_name(n.gate(gate).output))
            }
            FaultSite::Output { index } => format!("{net}>PO{index}/sa{v}"),
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.stuck_value as u8;
        match self.site {
            FaultSite::Stem => write!(f, "net{}/sa{v}", self.net),
            FaultSite::Branch { gate, pin } => write!(f, "net{}>g{gate}.{pin}/sa{v}", self.net),
            FaultSite::Output { index } => write!(f, "net{}>PO{index}/sa{v}", self.net),
        }
    }
}

fn uncollapsed(n: &Netlist) -> Vec<Fault> {
    let mut faults = Vec::new();
    for net in 0..n.net_count() {
        for v in [false, true] {
            faults.push(Fault::stem(net, v));
        }
        if n.fanout(net) > 1 {
            for sink in n.sinks(net) {
                let site = match *sink {
                    Sink::GatePin { gate, pin } => FaultSite::Branch { gate, pin },
                    Sink::Output { index } => FaultSite::Output { index },
                };
                for v in [false, true] {
                    faults.push(Fault {
                        net,
                        stuck_value: v,
                        site,
                    });
                }
            }
        }
    }
    faults
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // smaller index stays the representative
        if ra < rb {
            self.0[rb] = ra;
        } else {
            self.0[ra] = rb;
        }
    }
}

fn collapse(n: &Netlist, faults: Vec<Fault>) -> Vec<Fault> {
    let index: std::collections::HashMap<Fault, usize> =
        faults.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    // fault seen by gate `g` on pin `pin`: the branch if the net fans out, else the stem
    let pin_fault = |g: usize, pin: usize, v: bool| {
        let net = n.gate(g).inputs[pin];
        let site = if n.fanout(net) > 1 {
            FaultSite::Branch { gate: g, pin }
        } else {
            FaultSite::Stem
        };
        index[&Fault {
            net,
            stuck_value: v,
            site,
        }]
    };
    let out_fault = |g: usize, v: bool| index[&Fault::stem(n.gate(g).output, v)];

    let mut uf = UnionFind((0..faults.len()).collect());
    let mut dominating = Vec::new();
    for (g, gate) in n.gates().iter().enumerate() {
        let arity = gate.inputs.len();
        // (controlling input value, resulting output value) for equivalence
        let (kind, inverting) = match (gate.kind, arity) {
            (GateKind::Buf, _) | (GateKind::And | GateKind::Or | GateKind::Xor, 1) => (None, false),
            (GateKind::Not, _) | (GateKind::Nand | GateKind::Nor | GateKind::Xnor, 1) => {
                (None, true)
            }
            (GateKind::And, _) => (Some((false, false)), false),
            (GateKind::Nand, _) => (Some((false, true)), false),
            (GateKind::Or, _) => (Some((true, true)), false),
            (GateKind::Nor, _) => (Some((true, false)), false),
            (GateKind::Xor | GateKind::Xnor, _) => continue,
        };
        match kind {
            None => {
                for v in [false, true] {
                    uf.union(pin_fault(g, 0, v), out_fault(g, v ^ inverting));
                }
            }
            Some((controlling, forced)) => {
                for pin in 0..arity {
                    uf.union(pin_fault(g, pin, controlling), out_fault(g, forced));
                }
                // output stuck at the non-forced value dominates the
                // non-controlling input faults
                dominating.push(out_fault(g, !forced));
            }
        }
    }
    let mut dropped = vec![false; faults.len()];
    for f in dominating {
        let root = uf.find(f);
        dropped[root] = true;
    }
    faults
        .iter()
        .enumerate()
        .filter(|(i, _)| uf.find(*i) == *i && !dropped[*i])
        .map(|(_, f)| *f)
        .collect()
}

/// Stuck-at-0/1 faults on every stem and on every branch of nets with
/// fanout above one. With `collapse`, equivalent faults are merged to one
/// representative and gate-output faults dominating input faults are removed.
pub fn enumerate_faults(n: &Netlist, collapse_faults: bool) -> Vec<Fault> {
    let all = uncollapsed(n);
    if collapse_faults {
        collapse(n, all)
    } else {
        all
    }
}

/// Simulates one pattern with `f` injected.
pub fn fault_simulate(n: &Netlist, f: &Fault, inputs: &Bits) -> Result<Bits, NetlistError> {
    if f.net >= n.net_count() {
        return Err(NetlistError::InvalidArgument(format!("fault on unknown net {}", f.net)));
    }
    n.simulate_bits(inputs, Some(f))
}

#[cfg(test)]
mod tests {
    use super::super::{good_simulate, parse_netlist};
    use super::*;

    #[test]
    fn and_gate_fault_counts() {
        let n = parse_netlist("INPUT(a) INPUT(b) OUTPUT(y) y = AND(a, b)").unwrap();
        assert_eq!(enumerate_faults(&n, false).len(), 6);
        // a/sa0 == b/sa0 == y/sa0; y/sa1 dominated
        assert_eq!(enumerate_faults(&n, true).len(), 3);
    }

    #[test]
    fn buffer_chain_collapses() {
        let n = parse_netlist("INPUT(a)\nOUTPUT(y)\ny = BUF(a)\n").unwrap();
        assert_eq!(enumerate_faults(&n, false).len(), 4);
        assert_eq!(enumerate_faults(&n, true).len(), 2);
    }

    #[test]
    fn fanout_adds_branches() {
        // a fans out to two gates: stems 3 nets * 2 + branches 2 * 2
        let n = parse_netlist("INPUT(a)\nOUTPUT(y)\nOUTPUT(z)\ny = NOT(a)\nz = BUF(a)\n").unwrap();
        assert_eq!(enumerate_faults(&n, false).len(), 10);
    }

    #[test]
    fn and_gate_detection() {
        let n = parse_netlist("INPUT(a) INPUT(b) OUTPUT(y) y = AND(a, b)").unwrap();
        let a = n.net_id("a").unwrap();
        let y = n.net_id("y").unwrap();
        let input: Bits = vec![false, true].into();
        let faulty = fault_simulate(&n, &Fault::stem(a, true), &input).unwrap();
        assert_eq!(faulty.to_string(), "1");
        assert_ne!(faulty, good_simulate(&n, &input).unwrap());
        let input: Bits = vec![false, false].into();
        let faulty = fault_simulate(&n, &Fault::stem(y, false), &input).unwrap();
        assert_eq!(faulty, good_simulate(&n, &input).unwrap());
    }

    #[test]
    fn branch_fault_only_hits_its_pin() {
        let n = parse_netlist("INPUT(a)\nOUTPUT(y)\nOUTPUT(z)\ny = NOT(a)\nz = BUF(a)\n").unwrap();
        let a = n.net_id("a").unwrap();
        let f = Fault {
            net: a,
            stuck_value: true,
            site: FaultSite::Branch { gate: 1, pin: 0 },
        };
        let out = fault_simulate(&n, &f, &vec![false].into()).unwrap();
        // y = NOT(0) = 1 unaffected, z sees the stuck 1
        assert_eq!(out.to_string(), "11");
    }
}
