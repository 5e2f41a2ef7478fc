//! Gate-level ALU matching [`crate::microarch::alu_eval`].
//!
//! Primary inputs are `op0..op3 ‖ a0.. ‖ b0..` and primary outputs
//! `r0.. ‖ carry ‖ zero`, the same layout as a cycle trace.

use crate::microarch::{Opcode, OPCODE_BITS};

use super::{GateKind, Netlist, NetlistBuilder, NetlistError};

pub const MAX_ALU_WIDTH: u32 = 8;

struct Gen {
    b: NetlistBuilder,
    next: usize,
}

impl Gen {
    fn gate(&mut self, kind: GateKind, inputs: &[&str]) -> String {
        let name = format!("n{}", self.next);
        self.next += 1;
        self.b.gate(kind, &name, inputs);
        name
    }

    fn and2(&mut self, a: &str, b: &str) -> String {
        self.gate(GateKind::And, &[a, b])
    }

    fn or_all(&mut self, inputs: &[String]) -> String {
        let refs: Vec<&str> = inputs.iter().map(String::as_str).collect();
        self.gate(GateKind::Or, &refs)
    }

    /// One barrel-shifter direction. `left` shifts towards the MSB.
    fn shifter(&mut self, a: &[String], amount: &[String], valid: &Option<String>, left: bool) -> Vec<Option<String>> {
        let w = a.len();
        let mut cur: Vec<Option<String>> = a.iter().cloned().map(Some).collect();
        for (k, s) in amount.iter().enumerate() {
            let dist = 1usize << k;
            let ns = self.gate(GateKind::Not, &[s]);
            let mut next = Vec::with_capacity(w);
            for i in 0..w {
                let from = if left { i.checked_sub(dist) } else { i.checked_add(dist).filter(|j| *j < w) };
                let keep = cur[i].as_ref().map(|c| self.and2(&ns, c));
                let moved = from.and_then(|j| cur[j].clone()).map(|c| self.and2(s, &c));
                next.push(match (keep, moved) {
                    (Some(x), Some(y)) => Some(self.or_all(&[x, y])),
                    (x, y) => x.or(y),
                });
            }
            cur = next;
        }
        match valid {
            Some(v) => cur.into_iter().map(|c| c.map(|c| self.and2(v, &c))).collect(),
            None => cur,
        }
    }
}

/// Builds the datapath ALU as a gate-level netlist for `width` in `1..=8`.
pub fn generate_alu_netlist(width: u32) -> Result<Netlist, NetlistError> {
    if width == 0 || width > MAX_ALU_WIDTH {
        return Err(NetlistError::InvalidArgument(format!(
            "ALU width {width} outside 1..={MAX_ALU_WIDTH}"
        )));
    }
    let w = width as usize;
    let mut g = Gen {
        b: NetlistBuilder::new(),
        next: 0,
    };
    let op: Vec<String> = (0..OPCODE_BITS).map(|i| format!("op{i}")).collect();
    let a: Vec<String> = (0..w).map(|i| format!("a{i}")).collect();
    let b: Vec<String> = (0..w).map(|i| format!("b{i}")).collect();
    for name in op.iter().chain(&a).chain(&b) {
        g.b.input(name);
    }
    let result: Vec<String> = (0..w).map(|i| format!("r{i}")).collect();
    for name in &result {
        g.b.output(name);
    }
    g.b.output("carry");
    g.b.output("zero");

    // opcode decoder
    let nop: Vec<String> = op.iter().map(|o| g.gate(GateKind::Not, &[o])).collect();
    let select = |g: &mut Gen, code: Opcode| {
        let lits: Vec<&str> = (0..OPCODE_BITS as usize)
            .map(|i| if code.code() >> i & 1 == 1 { op[i].as_str() } else { nop[i].as_str() })
            .collect();
        g.gate(GateKind::And, &lits)
    };
    let sel: Vec<(Opcode, String)> = Opcode::ALL.iter().map(|&c| (c, select(&mut g, c))).collect();
    let sel_of = |c: Opcode| sel.iter().find(|(k, _)| *k == c).map(|(_, s)| s.clone()).unwrap();

    let na: Vec<String> = a.iter().map(|x| g.gate(GateKind::Not, &[x])).collect();

    // ripple-carry adder
    let mut add = Vec::with_capacity(w);
    let mut carry: Option<String> = None;
    for i in 0..w {
        let x = g.gate(GateKind::Xor, &[&a[i], &b[i]]);
        let gen = g.and2(&a[i], &b[i]);
        match carry {
            None => {
                add.push(x);
                carry = Some(gen);
            }
            Some(c) => {
                add.push(g.gate(GateKind::Xor, &[&x, &c]));
                let prop = g.and2(&x, &c);
                carry = Some(g.or_all(&[gen, prop]));
            }
        }
    }
    let add_carry = carry.expect("width >= 1");

    // ripple-borrow subtractor
    let mut sub = Vec::with_capacity(w);
    let mut borrow: Option<String> = None;
    for i in 0..w {
        let x = g.gate(GateKind::Xor, &[&a[i], &b[i]]);
        let gen = g.and2(&na[i], &b[i]);
        match borrow {
            None => {
                sub.push(x);
                borrow = Some(gen);
            }
            Some(br) => {
                sub.push(g.gate(GateKind::Xor, &[&x, &br]));
                let nx = g.gate(GateKind::Not, &[&x]);
                let prop = g.and2(&nx, &br);
                borrow = Some(g.or_all(&[gen, prop]));
            }
        }
    }
    let sub_borrow = borrow.expect("width >= 1");

    // shifts by b: low stage bits drive the barrel, any higher bit forces 0
    let stages = (usize::BITS - (w - 1).leading_zeros()) as usize;
    let amount: Vec<String> = b[..stages].to_vec();
    let valid = (stages < w).then(|| {
        let high: Vec<&str> = b[stages..].iter().map(String::as_str).collect();
        g.gate(GateKind::Nor, &high)
    });
    let shl = g.shifter(&a, &amount, &valid, true);
    let shr = g.shifter(&a, &amount, &valid, false);

    let and: Vec<String> = (0..w).map(|i| g.and2(&a[i], &b[i])).collect();
    let or: Vec<String> = (0..w).map(|i| g.gate(GateKind::Or, &[&a[i], &b[i]])).collect();
    let xor: Vec<String> = (0..w).map(|i| g.gate(GateKind::Xor, &[&a[i], &b[i]])).collect();

    for i in 0..w {
        let units: [(Opcode, Option<&String>); 10] = [
            (Opcode::LoadC, Some(&b[i])),
            (Opcode::Mov, Some(&a[i])),
            (Opcode::Add, Some(&add[i])),
            (Opcode::Sub, Some(&sub[i])),
            (Opcode::Shl, shl[i].as_ref()),
            (Opcode::Shr, shr[i].as_ref()),
            (Opcode::And, Some(&and[i])),
            (Opcode::Or, Some(&or[i])),
            (Opcode::Xor, Some(&xor[i])),
            (Opcode::Not, Some(&na[i])),
        ];
        let terms: Vec<String> = units
            .iter()
            .filter_map(|(c, v)| v.map(|v| (*c, v.clone())))
            .map(|(c, v)| {
                let s = sel_of(c);
                g.and2(&s, &v)
            })
            .collect();
        let refs: Vec<&str> = terms.iter().map(String::as_str).collect();
        g.b.gate(GateKind::Or, &result[i], &refs);
    }
    let c_add = g.and2(&sel_of(Opcode::Add), &add_carry);
    let c_sub = g.and2(&sel_of(Opcode::Sub), &sub_borrow);
    g.b.gate(GateKind::Or, "carry", &[&c_add, &c_sub]);
    let rrefs: Vec<&str> = result.iter().map(String::as_str).collect();
    g.b.gate(GateKind::Nor, "zero", &rrefs);
    g.b.build()
}
