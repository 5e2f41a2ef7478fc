//! Incremental stuck-at coverage of a functional test set.
//!
//! Each operand pair is run through the built-in microprogram; its cycle
//! stimuli are applied to the ALU netlist and every still-undetected fault
//! is simulated against them. Coverage is reported cumulatively per pair.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::bits::Bits;
use crate::microarch::{alu_input_len, alu_output_len, run_operation, ArithOp, MicroarchError};
use crate::sensitivity::OperandPair;
use crate::signature::{fold_response, MisrState};

use super::{Fault, Netlist};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradeError {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error(transparent)]
    Microarch(#[from] MicroarchError),
    #[error("malformed coverage CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
}

/// How a fault counts as detected within one operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionMode {
    /// Any primary output differs on any cycle.
    Direct,
    /// The operation's MISR signature differs (register restarted from the
    /// given state for every operation).
    Signature(MisrState),
}

/// One row of the incremental coverage table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRow {
    pub k: usize,
    pub operand1: u64,
    pub operand2: u64,
    pub result: u128,
    /// Cycles spent on this operation.
    pub cycles: usize,
    /// Running total of cycles.
    pub cumulative_cycles: usize,
    /// Cumulative fault coverage in percent.
    pub fc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub rows: Vec<CoverageRow>,
    pub total_faults: usize,
    /// Cumulative detected-fault count after each row.
    pub detected: Vec<usize>,
    /// Index of the pair that first detected each fault.
    pub first_detection: Vec<Option<usize>>,
    /// Set when the fault list was empty and coverage is vacuously 100%.
    pub vacuous: bool,
}

pub const COVERAGE_HEADER: &str = "k,operand1,operand2,result,N_k,N,FC";

impl CoverageReport {
    pub fn final_coverage(&self) -> f64 {
        self.rows.last().map_or(
            if self.total_faults == 0 { 100.0 } else { 0.0 },
            |r| r.fc,
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(COVERAGE_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.k, r.operand1, r.operand2, r.result, r.cycles, r.cumulative_cycles, r.fc
            );
        }
        out
    }

    pub fn rows_from_csv(text: &str) -> Result<Vec<CoverageRow>, GradeError> {
        let mut lines = text.lines().enumerate();
        if lines.next().map(|(_, h)| h.trim()) != Some(COVERAGE_HEADER) {
            return Err(GradeError::Csv {
                line: 1,
                message: format!("expected header `{COVERAGE_HEADER}`"),
            });
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| GradeError::Csv { line: i + 1, message };
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 7 {
                return Err(err(format!("expected 7 fields, found {}", f.len())));
            }
            let bad = |s: &str| err(format!("bad value `{s}`"));
            rows.push(CoverageRow {
                k: f[0].parse().map_err(|_| bad(f[0]))?,
                operand1: f[1].parse().map_err(|_| bad(f[1]))?,
                operand2: f[2].parse().map_err(|_| bad(f[2]))?,
                result: f[3].parse().map_err(|_| bad(f[3]))?,
                cycles: f[4].parse().map_err(|_| bad(f[4]))?,
                cumulative_cycles: f[5].parse().map_err(|_| bad(f[5]))?,
                fc: f[6].parse().map_err(|_| bad(f[6]))?,
            });
        }
        Ok(rows)
    }
}

/// Up to 64 cycles packed one bit per cycle.
struct Block {
    inputs: Vec<u64>,
    good: Vec<u64>,
    valid: u64,
    len: usize,
}

fn pack(n: &Netlist, stimuli: &[Bits]) -> Vec<Block> {
    stimuli
        .chunks(64)
        .map(|chunk| {
            let mut inputs = vec![0u64; n.primary_inputs().len()];
            for (p, s) in chunk.iter().enumerate() {
                for (i, bit) in s.iter().enumerate() {
                    inputs[i] |= (bit as u64) << p;
                }
            }
            let good = n.simulate_words(&inputs, None);
            let valid = if chunk.len() == 64 { !0 } else { (1u64 << chunk.len()) - 1 };
            Block {
                inputs,
                good,
                valid,
                len: chunk.len(),
            }
        })
        .collect()
}

fn responses(outputs: &[u64], len: usize) -> impl Iterator<Item = Bits> + '_ {
    (0..len).map(move |p| outputs.iter().map(|w| w >> p & 1 == 1).collect())
}

fn signature(blocks: &[Block], outs: impl Fn(&Block) -> Vec<u64>, s0: &MisrState) -> MisrState {
    blocks.iter().fold(*s0, |s, b| {
        responses(&outs(b), b.len).fold(s, |s, r| s.step_word(fold_response(&r, s.width())))
    })
}

fn detects(n: &Netlist, fault: &Fault, blocks: &[Block], mode: &DetectionMode, good_sig: Option<MisrState>) -> bool {
    match mode {
        DetectionMode::Direct => blocks.iter().any(|b| {
            n.simulate_words(&b.inputs, Some(fault))
                .iter()
                .zip(&b.good)
                .any(|(f, g)| (f ^ g) & b.valid != 0)
        }),
        DetectionMode::Signature(s0) => {
            let faulty = signature(blocks, |b| n.simulate_words(&b.inputs, Some(fault)), s0);
            Some(faulty) != good_sig
        }
    }
}

/// Grades `pairs` (in order) against `faults` on the ALU netlist `n`.
///
/// The netlist must expose the cycle-trace layout for the pairs' width:
/// `4 + 2w` primary inputs and `w + 2` primary outputs. Faults are dropped
/// once detected. An empty fault list reports 100% with `vacuous` set.
pub fn grade_test_set(
    n: &Netlist,
    pairs: &[OperandPair],
    op: ArithOp,
    faults: &[Fault],
    mode: DetectionMode,
) -> Result<CoverageReport, GradeError> {
    let mut report = CoverageReport {
        rows: Vec::with_capacity(pairs.len()),
        total_faults: faults.len(),
        detected: Vec::with_capacity(pairs.len()),
        first_detection: vec![None; faults.len()],
        vacuous: faults.is_empty(),
    };
    if let Some(f) = faults.iter().find(|f| f.net >= n.net_count()) {
        return Err(GradeError::InvalidConfiguration(format!(
            "fault {f} refers to a net outside the netlist"
        )));
    }
    let mut cumulative = 0;
    let mut detected = 0;
    for (k, pair) in pairs.iter().enumerate() {
        let width = pair.operand_bits();
        let (pi, po) = (n.primary_inputs().len(), n.primary_outputs().len());
        if pi != alu_input_len(width) || po != alu_output_len(width) {
            return Err(GradeError::InvalidConfiguration(format!(
                "netlist has {pi} inputs / {po} outputs, a {width}-bit trace needs {} / {}",
                alu_input_len(width),
                alu_output_len(width)
            )));
        }
        let run = run_operation(op, pair.x(), pair.y(), width)?;
        let stimuli: Vec<Bits> = (0..run.trace.len()).map(|c| run.trace.input_bits(c)).collect();
        let blocks = pack(n, &stimuli);
        let good_sig = match &mode {
            DetectionMode::Signature(s0) => Some(signature(&blocks, |b| b.good.clone(), s0)),
            DetectionMode::Direct => None,
        };
        let newly: Vec<usize> = report
            .first_detection
            .par_iter()
            .enumerate()
            .filter(|(_, d)| d.is_none())
            .filter(|(i, _)| detects(n, &faults[*i], &blocks, &mode, good_sig))
            .map(|(i, _)| i)
            .collect();
        for i in newly {
            report.first_detection[i] = Some(k);
            detected += 1;
        }
        cumulative += run.trace.len();
        let fc = if faults.is_empty() {
            100.0
        } else {
            detected as f64 * 100.0 / faults.len() as f64
        };
        report.rows.push(CoverageRow {
            k: k + 1,
            operand1: pair.x(),
            operand2: pair.y(),
            result: run.result(op),
            cycles: run.trace.len(),
            cumulative_cycles: cumulative,
            fc,
        });
        report.detected.push(detected);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{enumerate_faults, generate_alu_netlist};

    fn pair(x: u64, y: u64) -> OperandPair {
        OperandPair::new(x, y, 4).unwrap()
    }

    #[test]
    fn empty_fault_list_is_vacuous() {
        let n = generate_alu_netlist(4).unwrap();
        let r = grade_test_set(&n, &[pair(3, 5)], ArithOp::Mul, &[], DetectionMode::Direct).unwrap();
        assert!(r.vacuous);
        assert_eq!(r.rows[0].fc, 100.0);
    }

    #[test]
    fn replayed_pair_adds_cycles_not_coverage() {
        let n = generate_alu_netlist(4).unwrap();
        let faults = enumerate_faults(&n, false);
        let r = grade_test_set(&n, &[pair(11, 6), pair(11, 6)], ArithOp::Mul, &faults, DetectionMode::Direct)
            .unwrap();
        assert_eq!(r.rows[1].cumulative_cycles, 2 * r.rows[0].cycles);
        assert_eq!(r.rows[0].fc, r.rows[1].fc);
        assert_eq!(r.rows[0].result, 66);
        assert!(r.rows[0].fc > 0.0);
    }

    #[test]
    fn layout_mismatch_rejected() {
        let n = generate_alu_netlist(3).unwrap();
        let faults = enumerate_faults(&n, false);
        let err = grade_test_set(&n, &[pair(1, 1)], ArithOp::Mul, &faults, DetectionMode::Direct);
        assert!(matches!(err, Err(GradeError::InvalidConfiguration(_))));
    }

    #[test]
    fn signature_mode_never_exceeds_direct() {
        let n = generate_alu_netlist(4).unwrap();
        let faults = enumerate_faults(&n, false);
        let pairs = [pair(13, 7), pair(2, 9)];
        let direct = grade_test_set(&n, &pairs, ArithOp::Div, &faults, DetectionMode::Direct).unwrap();
        let misr = MisrState::new(8, crate::signature::PRIMITIVE_POLY_8, 0).unwrap();
        let sig = grade_test_set(&n, &pairs, ArithOp::Div, &faults, DetectionMode::Signature(misr)).unwrap();
        for (d, s) in direct.rows.iter().zip(&sig.rows) {
            assert!(s.fc <= d.fc);
        }
    }

    #[test]
    fn csv_round_trip() {
        let n = generate_alu_netlist(4).unwrap();
        let faults = enumerate_faults(&n, true);
        let r = grade_test_set(&n, &[pair(9, 4), pair(15, 3)], ArithOp::Div, &faults, DetectionMode::Direct)
            .unwrap();
        assert_eq!(CoverageReport::rows_from_csv(&r.to_csv()).unwrap(), r.rows);
        assert_eq!(r.rows[0].result, 2);
    }
}
