//! Bit-inversion sensitivity of arithmetic results to single operand-bit flips.
//!
//! For an operand pair `(x, y)` each of the `2·n` input bits is inverted in
//! turn and the arithmetic result recomputed. Row `i` of the matrix records
//! which output bits changed. The fitness of a pattern is the fraction of
//! set cells.

use std::fmt;

use thiserror::Error;

use crate::microarch::{alu_reference, mask, ArithOp, Word};

/// Widest operand the sensitivity analysis handles (rows are packed into `u64`).
pub const MAX_OPERAND_BITS: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SensitivityError {
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A functional test pattern: two operands of equal width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperandPair {
    x: u64,
    y: u64,
    bits: u32,
}

impl OperandPair {
    /// Operands are reduced modulo `2^bits`.
    pub fn new(x: u64, y: u64, bits: u32) -> Result<Self, SensitivityError> {
        if bits == 0 || bits > MAX_OPERAND_BITS {
            return Err(SensitivityError::InvalidArgument(format!(
                "operand width {bits} outside 1..={MAX_OPERAND_BITS}"
            )));
        }
        let m = mask(bits);
        Ok(OperandPair {
            x: x & m,
            y: y & m,
            bits,
        })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn y(&self) -> u64 {
        self.y
    }

    /// Width of each operand.
    pub fn operand_bits(&self) -> u32 {
        self.bits
    }

    pub fn x_word(&self) -> Word {
        Word::new(self.x, self.bits).expect("width checked on construction")
    }

    pub fn y_word(&self) -> Word {
        Word::new(self.y, self.bits).expect("width checked on construction")
    }

    /// The chromosome as one `2·n`-bit string: x in bits `0..n`, y above.
    pub fn concat(&self) -> u64 {
        self.x | self.y << self.bits
    }

    pub fn from_concat(chromosome: u64, bits: u32) -> Result<Self, SensitivityError> {
        let m = mask(bits);
        OperandPair::new(chromosome & m, chromosome >> bits & m, bits)
    }

    /// Same pair with chromosome bit `bit` inverted.
    pub fn flip(&self, bit: u32) -> Self {
        debug_assert!(bit < 2 * self.bits);
        OperandPair::from_concat(self.concat() ^ 1u64 << bit, self.bits)
            .expect("width unchanged")
    }
}

impl fmt::Display for OperandPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Output columns for `op` at `bits`: full product, or quotient ‖ remainder.
pub fn output_bits(_op: ArithOp, bits: u32) -> usize {
    2 * bits as usize
}

/// Reference output as a packed word, or `None` when undefined (division by zero).
pub fn reference_output(pair: &OperandPair, op: ArithOp) -> Option<u64> {
    alu_reference(pair.x_word(), pair.y_word(), op)
        .ok()
        .map(|r| r.packed(pair.bits) as u64)
}

/// Boolean `2n × M` matrix; cell `(i, j)` set iff flipping input bit `i`
/// inverted output bit `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SensitivityMatrix {
    cols: usize,
    rows: Vec<u64>,
    /// Rows whose flipped pattern had no defined output (divisor became 0).
    undefined_rows: Vec<usize>,
}

impl SensitivityMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols <= 64, "at most 64 output columns");
        SensitivityMatrix {
            cols,
            rows: vec![0; rows],
            undefined_rows: Vec::new(),
        }
    }

    /// Builds a matrix from packed rows (bit `j` of a row is column `j`).
    pub fn from_rows(rows: Vec<u64>, cols: usize) -> Self {
        let m = mask(cols as u32);
        SensitivityMatrix {
            cols,
            rows: rows.into_iter().map(|r| r & m).collect(),
            undefined_rows: Vec::new(),
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row] >> col & 1 == 1
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        if value {
            self.rows[row] |= 1 << col;
        } else {
            self.rows[row] &= !(1 << col);
        }
    }

    pub fn undefined_rows(&self) -> &[usize] {
        &self.undefined_rows
    }

    pub fn covered_cells(&self) -> u64 {
        self.rows.iter().map(|r| r.count_ones() as u64).sum()
    }

    pub fn total_cells(&self) -> u64 {
        (self.rows.len() * self.cols) as u64
    }

    fn same_shape(&self, other: &SensitivityMatrix) -> bool {
        self.rows.len() == other.rows.len() && self.cols == other.cols
    }

    /// Cell-wise OR of `other` into `self`.
    pub fn union_with(&mut self, other: &SensitivityMatrix) -> Result<(), SensitivityError> {
        if !self.same_shape(other) {
            return Err(SensitivityError::InvalidArgument(format!(
                "matrix shape {}x{} does not match {}x{}",
                other.rows.len(),
                other.cols,
                self.rows.len(),
                self.cols
            )));
        }
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a |= b;
        }
        Ok(())
    }

    /// Number of cells set in `other` but not yet in `self`.
    pub fn gain(&self, other: &SensitivityMatrix) -> u64 {
        debug_assert!(self.same_shape(other));
        self.rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| (b & !a).count_ones() as u64)
            .sum()
    }

    /// Debug dump: one line of `0`/`1` per row, row 0 first, column 0 leftmost.
    pub fn dump(&self) -> String {
        self.to_string()
    }

    pub fn parse_dump(text: &str) -> Result<Self, SensitivityError> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let cols = lines.first().map_or(0, |l| l.trim().len());
        if cols > 64 {
            return Err(SensitivityError::InvalidArgument("more than 64 columns".into()));
        }
        let mut rows = Vec::with_capacity(lines.len());
        for (i, line) in lines.iter().enumerate() {
            let line = line.trim();
            if line.len() != cols {
                return Err(SensitivityError::InvalidArgument(format!(
                    "row {i} has {} columns, expected {cols}",
                    line.len()
                )));
            }
            let mut row = 0u64;
            for (j, c) in line.chars().enumerate() {
                match c {
                    '0' => {}
                    '1' => row |= 1 << j,
                    _ => {
                        return Err(SensitivityError::InvalidArgument(format!(
                            "row {i}: unexpected character `{c}`"
                        )))
                    }
                }
            }
            rows.push(row);
        }
        Ok(SensitivityMatrix::from_rows(rows, cols))
    }
}

impl fmt::Display for SensitivityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            for j in 0..self.cols {
                f.write_str(if row >> j & 1 == 1 { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Sensitivity matrix of `pair` under `op`, computed from the arithmetic oracle.
///
/// For DIV a flip that zeroes the divisor leaves its row clear and records
/// it in [`SensitivityMatrix::undefined_rows`].
pub fn sensitivity_matrix(
    pair: &OperandPair,
    op: ArithOp,
) -> Result<SensitivityMatrix, SensitivityError> {
    let base = reference_output(pair, op).ok_or_else(|| {
        SensitivityError::InvalidPattern(format!("divisor is zero in {pair}"))
    })?;
    let n = pair.operand_bits();
    let cols = output_bits(op, n);
    let out_mask = mask(cols as u32);
    let mut matrix = SensitivityMatrix::zeros(2 * n as usize, cols);
    for bit in 0..2 * n {
        match reference_output(&pair.flip(bit), op) {
            Some(out) => matrix.rows[bit as usize] = (out ^ base) & out_mask,
            None => matrix.undefined_rows.push(bit as usize),
        }
    }
    Ok(matrix)
}

/// Fraction of set cells, `Σ p_ij / (2n·M)`.
pub fn fitness(m: &SensitivityMatrix) -> f64 {
    let total = m.total_cells();
    if total == 0 {
        return 0.0;
    }
    m.covered_cells() as f64 / total as f64
}

/// Fitness of the cell-wise union of `matrices`; 0 for an empty list.
pub fn accumulate_coverage(matrices: &[SensitivityMatrix]) -> Result<f64, SensitivityError> {
    let Some((first, rest)) = matrices.split_first() else {
        return Ok(0.0);
    };
    let mut union = first.clone();
    for m in rest {
        union.union_with(m)?;
    }
    Ok(fitness(&union))
}

/// Sensitivity fitness of a pair; zero when the base pattern is undefined.
pub fn pattern_fitness(pair: &OperandPair, op: ArithOp) -> f64 {
    sensitivity_matrix(pair, op).map_or(0.0, |m| fitness(&m))
}
