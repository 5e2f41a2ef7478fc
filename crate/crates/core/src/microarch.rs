//! Cycle-level model of the register-file + ALU datapath.
//!
//! Programs are straight-line sequences of four-field microoperations
//! (`opcode, dest, src1, src2`). Every executed microoperation is one ALU
//! cycle; the ALU sees `opcode ‖ src1 ‖ src2` on its inputs and drives
//! `result ‖ carry ‖ zero` on its outputs. The per-cycle stimulus/response
//! pairs form the [`CycleTrace`] that functional BIST feeds to the ALU.
//!
//! The built-in multiplier (shift-add) and divider (restoring) programs are
//! fully unrolled, so they share one representation with evolved programs.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bits::Bits;

/// Width of the opcode field on the ALU inputs.
pub const OPCODE_BITS: u32 = 4;
/// Widest word the datapath models.
pub const MAX_WORD_BITS: u32 = 64;
/// Widest operand the built-in programs are generated for.
pub const MAX_PROGRAM_WIDTH: u32 = 32;

/// Register roles used by the built-in programs.
pub mod layout {
    /// Multiplicand / dividend.
    pub const OPERAND_A: usize = 0;
    /// Multiplier / divisor.
    pub const OPERAND_B: usize = 1;
    /// Product high word, or quotient.
    pub const RESULT_HIGH: usize = 2;
    /// Product low word, or remainder.
    pub const RESULT_LOW: usize = 3;
    /// Iteration counter, decremented once per step.
    pub const COUNTER: usize = 4;
    /// Register count the built-in programs are written against.
    pub const BUILTIN_REGISTERS: usize = 9;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MicroarchError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("division by zero at cycle {cycle}")]
    DivideByZero { cycle: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

type Result<T> = std::result::Result<T, MicroarchError>;

/// All-ones mask of `width` bits.
pub fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

fn check_width(width: u32) -> Result<()> {
    if width == 0 || width > MAX_WORD_BITS {
        return Err(MicroarchError::InvalidArgument(format!(
            "word width {width} outside 1..={MAX_WORD_BITS}"
        )));
    }
    Ok(())
}

/// Fixed-width unsigned value. The value is always reduced modulo `2^width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    value: u64,
    width: u32,
}

impl Word {
    pub fn new(value: u64, width: u32) -> Result<Self> {
        check_width(width)?;
        Ok(Word {
            value: value & mask(width),
            width,
        })
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn width(self) -> u32 {
        self.width
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Opcode {
    LoadC,
    Mov,
    Add,
    Sub,
    Shl,
    Shr,
    And,
    Or,
    Xor,
    Not,
}

impl Opcode {
    pub const ALL: [Opcode; 10] = [
        Opcode::LoadC,
        Opcode::Mov,
        Opcode::Add,
        Opcode::Sub,
        Opcode::Shl,
        Opcode::Shr,
        Opcode::And,
        Opcode::Or,
        Opcode::Xor,
        Opcode::Not,
    ];

    /// Binary encoding driven onto the ALU opcode inputs.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Opcode> {
        Opcode::ALL.get(code as usize).copied()
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Opcode::LoadC => "LOADC",
            Opcode::Mov => "MOV",
            Opcode::Add => "ADD",
            Opcode::Sub => "SUB",
            Opcode::Shl => "SHL",
            Opcode::Shr => "SHR",
            Opcode::And => "AND",
            Opcode::Or => "OR",
            Opcode::Xor => "XOR",
            Opcode::Not => "NOT",
        }
    }
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

impl FromStr for Opcode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Opcode::ALL
            .iter()
            .copied()
            .find(|op| op.mnemonic().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown opcode `{s}`"))
    }
}

/// Combinational ALU outputs for one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AluOutput {
    pub result: u64,
    pub carry: bool,
    pub zero: bool,
}

/// Evaluates the ALU for a raw 4-bit opcode encoding.
///
/// Encodings outside [`Opcode::ALL`] select no function unit: result 0,
/// carry 0, zero 1. Shifts move `a` by `b` positions (zero when `b >= width`)
/// and leave carry clear; ADD reports carry-out and SUB reports borrow.
pub fn alu_eval(code: u8, a: u64, b: u64, width: u32) -> AluOutput {
    let m = mask(width);
    let (a, b) = (a & m, b & m);
    let (result, carry) = match Opcode::from_code(code) {
        Some(Opcode::LoadC) => (b, false),
        Some(Opcode::Mov) => (a, false),
        Some(Opcode::Add) => {
            let sum = a as u128 + b as u128;
            (sum as u64 & m, sum >> width & 1 == 1)
        }
        Some(Opcode::Sub) => (a.wrapping_sub(b) & m, a < b),
        Some(Opcode::Shl) => (if b >= width as u64 { 0 } else { (a << b) & m }, false),
        Some(Opcode::Shr) => (if b >= width as u64 { 0 } else { a >> b }, false),
        Some(Opcode::And) => (a & b, false),
        Some(Opcode::Or) => (a | b, false),
        Some(Opcode::Xor) => (a ^ b, false),
        Some(Opcode::Not) => (!a & m, false),
        None => (0, false),
    };
    AluOutput {
        result,
        carry,
        zero: result == 0,
    }
}

/// Second ALU operand: a register or an immediate literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operand {
    Reg(usize),
    Lit(u64),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Reg(r) => write!(f, "r{r}"),
            Operand::Lit(v) => write!(f, "#{v}"),
        }
    }
}

/// One microoperation: `dest <- ALU(opcode, src1, src2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MicroOp {
    pub opcode: Opcode,
    pub dest: usize,
    pub src1: usize,
    pub src2: Operand,
}

impl MicroOp {
    pub fn new(opcode: Opcode, dest: usize, src1: usize, src2: Operand) -> Self {
        MicroOp {
            opcode,
            dest,
            src1,
            src2,
        }
    }

    pub fn reg(opcode: Opcode, dest: usize, src1: usize, src2: usize) -> Self {
        Self::new(opcode, dest, src1, Operand::Reg(src2))
    }

    pub fn lit(opcode: Opcode, dest: usize, src1: usize, literal: u64) -> Self {
        Self::new(opcode, dest, src1, Operand::Lit(literal))
    }

    fn reads(&self, reg: usize) -> bool {
        self.src1 == reg || self.src2 == Operand::Reg(reg)
    }
}

impl fmt::Display for MicroOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} r{}, r{}, {}",
            self.opcode, self.dest, self.src1, self.src2
        )
    }
}

fn parse_reg(tok: &str) -> std::result::Result<usize, String> {
    tok.strip_prefix('r')
        .or_else(|| tok.strip_prefix('R'))
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| format!("expected register `rK`, found `{tok}`"))
}

impl FromStr for MicroOp {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let (mnemonic, rest) = s
            .split_once(char::is_whitespace)
            .ok_or_else(|| format!("expected `OPCODE dest, src1, src2`, found `{s}`"))?;
        let opcode: Opcode = mnemonic.parse()?;
        let fields: Vec<&str> = rest.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(format!("expected 3 operands, found {}", fields.len()));
        }
        let dest = parse_reg(fields[0])?;
        let src1 = parse_reg(fields[1])?;
        let src2 = if let Some(lit) = fields[2].strip_prefix('#') {
            Operand::Lit(
                lit.parse()
                    .map_err(|_| format!("bad literal `{}`", fields[2]))?,
            )
        } else {
            Operand::Reg(parse_reg(fields[2])?)
        };
        Ok(MicroOp::new(opcode, dest, src1, src2))
    }
}

/// Straight-line microprogram.
///
/// `divisor`, when set, names a register that must hold a nonzero value
/// whenever an operation reads it; the built-in divider uses it to reject
/// division by zero. In text form it is written as a leading `.divisor rK`
/// directive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MicroProgram {
    pub ops: Vec<MicroOp>,
    pub divisor: Option<usize>,
}

impl MicroProgram {
    pub fn new(ops: Vec<MicroOp>) -> Self {
        MicroProgram { ops, divisor: None }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Checks register bounds and literal widths against a register file shape.
    pub fn validate(&self, register_count: usize, width: u32) -> Result<()> {
        let m = mask(width);
        if let Some(d) = self.divisor {
            if d >= register_count {
                return Err(MicroarchError::InvalidProgram(format!(
                    "divisor register r{d} out of range (register count {register_count})"
                )));
            }
        }
        for (i, op) in self.ops.iter().enumerate() {
            let regs = [Some(op.dest), Some(op.src1), match op.src2 {
                Operand::Reg(r) => Some(r),
                Operand::Lit(_) => None,
            }];
            if let Some(r) = regs.into_iter().flatten().find(|r| *r >= register_count) {
                return Err(MicroarchError::InvalidProgram(format!(
                    "op {i} (`{op}`) uses r{r} but register count is {register_count}"
                )));
            }
            if let Operand::Lit(v) = op.src2 {
                if v & !m != 0 {
                    return Err(MicroarchError::InvalidProgram(format!(
                        "op {i} (`{op}`) literal does not fit in {width} bits"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parses the one-op-per-line text form.
    pub fn parse(text: &str) -> Result<Self> {
        let mut program = MicroProgram::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| MicroarchError::Parse {
                line: idx + 1,
                message,
            };
            if let Some(rest) = line.strip_prefix(".divisor") {
                if program.divisor.is_some() || !program.ops.is_empty() {
                    return Err(err("`.divisor` must appear once, before any op".into()));
                }
                program.divisor = Some(parse_reg(rest.trim()).map_err(err)?);
                continue;
            }
            program.ops.push(line.parse().map_err(err)?);
        }
        Ok(program)
    }
}

impl fmt::Display for MicroProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(d) = self.divisor {
            writeln!(f, ".divisor r{d}")?;
        }
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}

impl FromStr for MicroProgram {
    type Err = MicroarchError;

    fn from_str(s: &str) -> Result<Self> {
        MicroProgram::parse(s)
    }
}

/// Uniform-width register block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RegisterFile {
    width: u32,
    regs: Vec<u64>,
}

impl RegisterFile {
    /// `count` zeroed registers. At least four are required (two operands,
    /// result and counter).
    pub fn new(count: usize, width: u32) -> Result<Self> {
        check_width(width)?;
        if count < 4 {
            return Err(MicroarchError::InvalidArgument(format!(
                "register file needs at least 4 registers, got {count}"
            )));
        }
        Ok(RegisterFile {
            width,
            regs: vec![0; count],
        })
    }

    /// Register file with the leading registers preloaded (values are masked).
    pub fn with_values(count: usize, width: u32, values: &[u64]) -> Result<Self> {
        let mut rf = Self::new(count, width)?;
        if values.len() > count {
            return Err(MicroarchError::InvalidArgument(format!(
                "{} initial values for {count} registers",
                values.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            rf.set(i, *v);
        }
        Ok(rf)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn count(&self) -> usize {
        self.regs.len()
    }

    pub fn get(&self, index: usize) -> u64 {
        self.regs[index]
    }

    pub fn word(&self, index: usize) -> Word {
        Word {
            value: self.regs[index],
            width: self.width,
        }
    }

    pub fn set(&mut self, index: usize, value: u64) {
        self.regs[index] = value & mask(self.width);
    }

    pub fn values(&self) -> &[u64] {
        &self.regs
    }
}

/// One executed ALU cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AluCycle {
    pub opcode: Opcode,
    pub src1: u64,
    pub src2: u64,
    pub output: AluOutput,
}

/// Per-cycle ALU stimulus and response over a program run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleTrace {
    width: u32,
    cycles: Vec<AluCycle>,
}

impl CycleTrace {
    pub fn new(width: u32) -> Self {
        CycleTrace {
            width,
            cycles: Vec::new(),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn cycles(&self) -> &[AluCycle] {
        &self.cycles
    }

    pub fn push(&mut self, cycle: AluCycle) {
        self.cycles.push(cycle);
    }

    /// Appends another trace of the same width.
    pub fn extend(&mut self, other: &CycleTrace) {
        assert_eq!(self.width, other.width, "trace width mismatch");
        self.cycles.extend_from_slice(&other.cycles);
    }

    /// ALU input width `l`: opcode bits plus two data words.
    pub fn input_len(&self) -> usize {
        alu_input_len(self.width)
    }

    /// ALU output width: result word plus carry and zero flags.
    pub fn output_len(&self) -> usize {
        alu_output_len(self.width)
    }

    /// `opcode ‖ src1 ‖ src2`, each field LSB first.
    pub fn input_bits(&self, cycle: usize) -> Bits {
        let c = &self.cycles[cycle];
        let mut bits = Bits::new();
        bits.push_u64(c.opcode.code() as u64, OPCODE_BITS);
        bits.push_u64(c.src1, self.width);
        bits.push_u64(c.src2, self.width);
        bits
    }

    /// `result ‖ carry ‖ zero`, result LSB first.
    pub fn output_bits(&self, cycle: usize) -> Bits {
        let c = &self.cycles[cycle];
        let mut bits = Bits::from_u64(c.output.result, self.width);
        bits.push(c.output.carry);
        bits.push(c.output.zero);
        bits
    }
}

pub fn alu_input_len(width: u32) -> usize {
    (OPCODE_BITS + 2 * width) as usize
}

pub fn alu_output_len(width: u32) -> usize {
    width as usize + 2
}

/// Runs `program` from `regs_init`, returning the final registers and the
/// cycle trace. Execution is a pure function of its arguments.
pub fn execute(
    program: &MicroProgram,
    regs_init: &RegisterFile,
) -> Result<(RegisterFile, CycleTrace)> {
    let width = regs_init.width();
    program.validate(regs_init.count(), width)?;
    let mut regs = regs_init.clone();
    let mut trace = CycleTrace::new(width);
    for (cycle, op) in program.ops.iter().enumerate() {
        if let Some(d) = program.divisor {
            if op.reads(d) && regs.get(d) == 0 {
                return Err(MicroarchError::DivideByZero { cycle });
            }
        }
        let a = regs.get(op.src1);
        let b = match op.src2 {
            Operand::Reg(r) => regs.get(r),
            Operand::Lit(v) => v,
        };
        let output = alu_eval(op.opcode.code(), a, b, width);
        regs.set(op.dest, output.result);
        trace.push(AluCycle {
            opcode: op.opcode,
            src1: a,
            src2: b,
            output,
        });
    }
    Ok((regs, trace))
}

fn check_program_width(width: u32) -> Result<()> {
    if width == 0 || width > MAX_PROGRAM_WIDTH {
        return Err(MicroarchError::InvalidArgument(format!(
            "program width {width} outside 1..={MAX_PROGRAM_WIDTH}"
        )));
    }
    Ok(())
}

/// Shift-add multiplier, unrolled over `width` steps.
///
/// Expects the multiplicand in r0 and the multiplier in r1; leaves the
/// double-width product in r2 (high) and r3 (low). Each step conditionally
/// adds the multiplicand into the high word (masking instead of branching),
/// recovers the carry from the operand and sum MSBs, and shifts the
/// `carry ‖ high ‖ low` chain right by one.
pub fn build_multiplier_program(width: u32) -> Result<MicroProgram> {
    use layout::*;
    use Opcode::*;
    check_program_width(width)?;
    let top = (width - 1) as u64;
    let (x, hi, lo, cnt) = (OPERAND_A, RESULT_HIGH, RESULT_LOW, COUNTER);
    let (t0, t1, t2) = (5, 6, 7);
    let mut ops = vec![
        MicroOp::lit(LoadC, hi, hi, 0),
        MicroOp::reg(Mov, lo, OPERAND_B, OPERAND_B),
        MicroOp::lit(LoadC, cnt, cnt, width as u64),
    ];
    for _ in 0..width {
        ops.extend([
            // mask = all-ones iff the multiplier LSB is set
            MicroOp::lit(And, t0, lo, 1),
            MicroOp::lit(Sub, t0, t0, 1),
            MicroOp::reg(Not, t0, t0, t0),
            MicroOp::reg(And, t0, x, t0),
            MicroOp::reg(Add, t1, hi, t0),
            // carry = msb((a & b) | ((a ^ b) & !sum))
            MicroOp::reg(And, t2, hi, t0),
            MicroOp::reg(Xor, t0, hi, t0),
            MicroOp::reg(Not, hi, t1, t1),
            MicroOp::reg(And, t0, t0, hi),
            MicroOp::reg(Or, t2, t2, t0),
            MicroOp::lit(Shr, t2, t2, top),
            // carry:sum:lo >>= 1
            MicroOp::lit(Shl, t0, t1, top),
            MicroOp::lit(Shr, lo, lo, 1),
            MicroOp::reg(Or, lo, lo, t0),
            MicroOp::lit(Shr, hi, t1, 1),
            MicroOp::lit(Shl, t2, t2, top),
            MicroOp::reg(Or, hi, hi, t2),
            MicroOp::lit(Sub, cnt, cnt, 1),
        ]);
    }
    Ok(MicroProgram::new(ops))
}

/// Restoring divider, unrolled over `width` steps.
///
/// Expects the dividend in r0 and the divisor in r1; leaves the quotient in
/// r2 and the remainder in r3. The divisor register is guarded, so
/// executing with a zero divisor fails with [`MicroarchError::DivideByZero`].
pub fn build_divider_program(width: u32) -> Result<MicroProgram> {
    use layout::*;
    use Opcode::*;
    check_program_width(width)?;
    let top = (width - 1) as u64;
    let (b, q, r, cnt) = (OPERAND_B, RESULT_HIGH, RESULT_LOW, COUNTER);
    let (t0, t1, t2, t3) = (5, 6, 7, 8);
    let mut ops = vec![
        MicroOp::reg(Mov, q, OPERAND_A, OPERAND_A),
        MicroOp::lit(LoadC, r, r, 0),
        MicroOp::lit(LoadC, cnt, cnt, width as u64),
    ];
    for _ in 0..width {
        ops.extend([
            // r:q <<= 1, keeping the bit shifted out of r in t0
            MicroOp::lit(Shr, t0, r, top),
            MicroOp::lit(Shl, r, r, 1),
            MicroOp::lit(Shr, t1, q, top),
            MicroOp::reg(Or, r, r, t1),
            MicroOp::lit(Shl, q, q, 1),
            // borrow of r - b = msb((!r & b) | ((!r | b) & (r - b)))
            MicroOp::reg(Sub, t1, r, b),
            MicroOp::reg(Not, t2, r, r),
            MicroOp::reg(Or, t3, t2, b),
            MicroOp::reg(And, t1, t1, t3),
            MicroOp::reg(And, t2, t2, b),
            MicroOp::reg(Or, t1, t1, t2),
            MicroOp::lit(Shr, t1, t1, top),
            // fits = shifted-out bit | !borrow
            MicroOp::lit(Xor, t1, t1, 1),
            MicroOp::reg(Or, t1, t1, t0),
            MicroOp::reg(Or, q, q, t1),
            MicroOp::lit(Sub, t1, t1, 1),
            MicroOp::reg(Not, t1, t1, t1),
            MicroOp::reg(And, t1, b, t1),
            MicroOp::reg(Sub, r, r, t1),
            MicroOp::lit(Sub, cnt, cnt, 1),
        ]);
    }
    Ok(MicroProgram {
        ops,
        divisor: Some(b),
    })
}

/// Arithmetic operation a datapath program implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Mul,
    Div,
}

impl ArithOp {
    pub fn build_program(self, width: u32) -> Result<MicroProgram> {
        match self {
            ArithOp::Mul => build_multiplier_program(width),
            ArithOp::Div => build_divider_program(width),
        }
    }
}

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArithOp::Mul => "mul",
            ArithOp::Div => "div",
        })
    }
}

impl FromStr for ArithOp {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mul" => Ok(ArithOp::Mul),
            "div" => Ok(ArithOp::Div),
            other => Err(format!("unknown operation `{other}` (expected mul or div)")),
        }
    }
}

/// Result of the arithmetic oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithResult {
    /// Full double-width product.
    Product(u128),
    Division { quotient: u64, remainder: u64 },
}

impl ArithResult {
    /// Output word as seen by the sensitivity analysis: the product, or
    /// `quotient ‖ remainder` with the quotient in the low half.
    pub fn packed(self, width: u32) -> u128 {
        match self {
            ArithResult::Product(p) => p,
            ArithResult::Division {
                quotient,
                remainder,
            } => quotient as u128 | (remainder as u128) << width,
        }
    }

    /// The value reported in coverage tables: product or quotient.
    pub fn primary(self) -> u128 {
        match self {
            ArithResult::Product(p) => p,
            ArithResult::Division { quotient, .. } => quotient as u128,
        }
    }
}

/// Arithmetic oracle for microprogram validation.
pub fn alu_reference(x: Word, y: Word, op: ArithOp) -> Result<ArithResult> {
    if x.width != y.width {
        return Err(MicroarchError::InvalidArgument(format!(
            "operand widths differ ({} vs {})",
            x.width, y.width
        )));
    }
    match op {
        ArithOp::Mul => Ok(ArithResult::Product(x.value as u128 * y.value as u128)),
        ArithOp::Div => {
            if y.value == 0 {
                return Err(MicroarchError::DivideByZero { cycle: 0 });
            }
            Ok(ArithResult::Division {
                quotient: x.value / y.value,
                remainder: x.value % y.value,
            })
        }
    }
}

/// One complete operation executed on the built-in program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationRun {
    pub registers: RegisterFile,
    pub trace: CycleTrace,
}

impl OperationRun {
    /// Product for MUL (high and low words joined), quotient for DIV.
    pub fn result(&self, op: ArithOp) -> u128 {
        let hi = self.registers.get(layout::RESULT_HIGH) as u128;
        let lo = self.registers.get(layout::RESULT_LOW) as u128;
        match op {
            ArithOp::Mul => hi << self.registers.width() | lo,
            ArithOp::Div => hi,
        }
    }

    pub fn remainder(&self) -> u64 {
        self.registers.get(layout::RESULT_LOW)
    }
}

/// Builds the program for `op` at `width`, loads `(x, y)` and runs it.
pub fn run_operation(op: ArithOp, x: u64, y: u64, width: u32) -> Result<OperationRun> {
    let program = op.build_program(width)?;
    run_program(&program, x, y, width)
}

/// Runs `program` with `(x, y)` loaded into r0/r1 of a built-in sized register file.
pub fn run_program(program: &MicroProgram, x: u64, y: u64, width: u32) -> Result<OperationRun> {
    let regs = RegisterFile::with_values(layout::BUILTIN_REGISTERS, width, &[x, y])?;
    let (registers, trace) = execute(program, &regs)?;
    Ok(OperationRun { registers, trace })
}
