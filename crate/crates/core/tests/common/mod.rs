//! Brute-force reference implementations used by the integration tests.
#![allow(dead_code)]

use fbist::microarch::{run_operation, ArithOp};
use fbist::netlist::{Fault, FaultSite, Netlist};
use fbist::sensitivity::OperandPair;
use rayon::prelude::*;

/// Output word of `op` as plain integers: the product, or quotient in the
/// low half and remainder in the high half. `None` for a zero divisor.
pub fn arith(x: u64, y: u64, n: u32, op: ArithOp) -> Option<u64> {
    match op {
        ArithOp::Mul => Some(x * y),
        ArithOp::Div => (y != 0).then(|| (x / y) | ((x % y) << n)),
    }
}

/// Sensitivity cells as booleans: `cells[i][j]` is set when flipping input
/// bit `i` of `x ‖ y` flips output bit `j`.
pub fn brute_sensitivity(x: u64, y: u64, n: u32, op: ArithOp) -> Option<Vec<Vec<bool>>> {
    let base = arith(x, y, n, op)?;
    let m = 2 * n as usize;
    let mut cells = vec![vec![false; m]; m];
    for (i, row) in cells.iter_mut().enumerate() {
        let (fx, fy) = if i < n as usize { (x ^ 1 << i, y) } else { (x, y ^ 1 << (i - n as usize)) };
        if let Some(out) = arith(fx, fy, n, op) {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (out ^ base) >> j & 1 == 1;
            }
        }
    }
    Some(cells)
}

pub fn brute_fitness(cells: &[Vec<bool>]) -> f64 {
    let set: usize = cells.iter().map(|r| r.iter().filter(|c| **c).count()).sum();
    set as f64 / (cells.len() * cells[0].len()) as f64
}

fn gate_fn(kind: &str, ins: &[bool]) -> bool {
    let ones = ins.iter().filter(|b| **b).count();
    match kind {
        "AND" => ones == ins.len(),
        "NAND" => ones != ins.len(),
        "OR" => ones > 0,
        "NOR" => ones == 0,
        "XOR" => ones % 2 == 1,
        "XNOR" => ones % 2 == 0,
        "NOT" => !ins[0],
        "BUF" | "BUFF" => ins[0],
        other => panic!("unknown gate {other}"),
    }
}

/// Evaluates the netlist by demand-driven recursion with `fault` forced as
/// a constant at its site.
pub fn eval_injected(n: &Netlist, inputs: &[bool], fault: Option<&Fault>) -> Vec<bool> {
    fn net(n: &Netlist, id: usize, inputs: &[bool], fault: Option<&Fault>, memo: &mut Vec<Option<bool>>) -> bool {
        if let Some(v) = memo[id] {
            return v;
        }
        let mut v = match n.primary_inputs().iter().position(|&p| p == id) {
            Some(k) => inputs[k],
            None => {
                let g = n.driver(id).expect("driven net");
                let gate = n.gate(g);
                let ins: Vec<bool> = gate
                    .inputs
                    .iter()
                    .enumerate()
                    .map(|(pin, &src)| match fault {
                        Some(f) if f.net == src && f.site == (FaultSite::Branch { gate: g, pin }) => f.stuck_value,
                        _ => net(n, src, inputs, fault, memo),
                    })
                    .collect();
                gate_fn(gate.kind.name(), &ins)
            }
        };
        if let Some(f) = fault {
            if f.net == id && f.site == FaultSite::Stem {
                v = f.stuck_value;
            }
        }
        memo[id] = Some(v);
        v
    }
    let mut memo = vec![None; n.net_count()];
    n.primary_outputs()
        .iter()
        .enumerate()
        .map(|(index, &po)| match fault {
            Some(f) if f.net == po && f.site == (FaultSite::Output { index }) => f.stuck_value,
            _ => net(n, po, inputs, fault, &mut memo),
        })
        .collect()
}

/// Every ALU stimulus (as bits) the built-in program applies for `pair`.
pub fn stimuli(pair: &OperandPair, op: ArithOp) -> Vec<Vec<bool>> {
    let run = run_operation(op, pair.x(), pair.y(), pair.operand_bits()).unwrap();
    (0..run.trace.len())
        .map(|c| run.trace.input_bits(c).iter().collect())
        .collect()
}

/// Cumulative FC (percent) after each pair, by direct observation without
/// fault dropping.
pub fn oracle_fc(n: &Netlist, pairs: &[OperandPair], op: ArithOp, faults: &[Fault]) -> Vec<f64> {
    let per_pair: Vec<Vec<(Vec<bool>, Vec<bool>)>> = pairs
        .iter()
        .map(|p| stimuli(p, op).into_iter().map(|s| { let good = eval_injected(n, &s, None); (s, good) }).collect())
        .collect();
    let first: Vec<Option<usize>> = faults
        .par_iter()
        .map(|f| {
            per_pair
                .iter()
                .position(|cycles| cycles.iter().any(|(s, good)| &eval_injected(n, s, Some(f)) != good))
        })
        .collect();
    (0..pairs.len())
        .map(|k| {
            let detected = first.iter().filter(|d| d.is_some_and(|d| d <= k)).count();
            detected as f64 * 100.0 / faults.len() as f64
        })
        .collect()
}

/// 2-bit ripple-carry adder: inputs a0 a1 b0 b1 cin, outputs s0 s1 cout.
pub const RIPPLE_ADDER_2: &str = "\
INPUT(a0)
INPUT(a1)
INPUT(b0)
INPUT(b1)
INPUT(cin)
OUTPUT(s0)
OUTPUT(s1)
OUTPUT(cout)
x0 = XOR(a0, b0)
s0 = XOR(x0, cin)
g0 = AND(a0, b0)
p0 = AND(x0, cin)
c1 = OR(g0, p0)
x1 = XOR(a1, b1)
s1 = XOR(x1, c1)
g1 = AND(a1, b1)
p1 = AND(x1, c1)
cout = OR(g1, p1)
";
