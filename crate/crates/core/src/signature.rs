//! MISR response compaction and the test-data compression ratio.

use thiserror::Error;

use crate::bits::Bits;
use crate::microarch::{mask, CycleTrace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Default register width.
pub const DEFAULT_WIDTH: u32 = 32;
/// Taps of x^32 + x^22 + x^2 + x + 1 (the x^32 term is implied).
pub const DEFAULT_POLYNOMIAL: u64 = 0x0040_0007;
/// Taps of the primitive x^8 + x^4 + x^3 + x^2 + 1.
pub const PRIMITIVE_POLY_8: u64 = 0x1D;

/// Multiple-input signature register.
///
/// `polynomial` holds the feedback taps below the implied degree term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MisrState {
    width: u32,
    polynomial: u64,
    state: u64,
}

impl Default for MisrState {
    fn default() -> Self {
        MisrState::new(DEFAULT_WIDTH, DEFAULT_POLYNOMIAL, 0).expect("valid default")
    }
}

impl MisrState {
    pub fn new(width: u32, polynomial: u64, seed: u64) -> Result<Self, SignatureError> {
        if width == 0 || width > 64 {
            return Err(SignatureError::InvalidArgument(format!(
                "MISR width {width} outside 1..=64"
            )));
        }
        if polynomial & !mask(width) != 0 {
            return Err(SignatureError::InvalidArgument(format!(
                "polynomial taps {polynomial:#x} exceed {width} bits"
            )));
        }
        if seed & !mask(width) != 0 {
            return Err(SignatureError::InvalidArgument(format!(
                "seed {seed:#x} exceeds {width} bits"
            )));
        }
        Ok(MisrState {
            width,
            polynomial,
            state: seed,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn polynomial(&self) -> u64 {
        self.polynomial
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// Same register configuration with a different state.
    pub fn with_state(&self, state: u64) -> Self {
        MisrState {
            state: state & mask(self.width),
            ..*self
        }
    }

    fn shifted(&self) -> u64 {
        let msb = self.state >> (self.width - 1) & 1;
        let next = if self.width == 64 { self.state << 1 } else { (self.state << 1) & mask(self.width) };
        if msb == 1 {
            next ^ self.polynomial
        } else {
            next
        }
    }

    /// One clock with a packed `width`-bit response.
    pub fn step_word(&self, response: u64) -> Self {
        self.with_state(self.shifted() ^ response)
    }

    /// Zero-padded hexadecimal signature.
    pub fn hex(&self) -> String {
        format!("{:0w$x}", self.state, w = self.width.div_ceil(4) as usize)
    }
}

/// Parses a tap mask given in hexadecimal, with or without a `0x` prefix.
pub fn parse_polynomial(text: &str) -> Result<u64, SignatureError> {
    let t = text.trim();
    let digits = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    u64::from_str_radix(digits, 16)
        .map_err(|_| SignatureError::InvalidArgument(format!("bad hexadecimal polynomial `{text}`")))
}

/// Shift with feedback, then XOR the response in parallel.
pub fn misr_step(s: &MisrState, response: &Bits) -> Result<MisrState, SignatureError> {
    if response.len() != s.width as usize {
        return Err(SignatureError::InvalidArgument(format!(
            "response has {} bits, MISR is {} bits wide",
            response.len(),
            s.width
        )));
    }
    Ok(s.step_word(response.field(0, response.len())))
}

/// XOR of consecutive `width`-bit chunks of `bits`.
pub fn fold_response(bits: &Bits, width: u32) -> u64 {
    let w = width as usize;
    (0..bits.len()).step_by(w).fold(0, |acc, start| {
        let len = w.min(bits.len() - start);
        acc ^ bits.field(start, len)
    })
}

/// Folds an arbitrary response stream into the register.
pub fn compress_responses<'a, I>(responses: I, s0: &MisrState) -> MisrState
where
    I: IntoIterator<Item = &'a Bits>,
{
    responses
        .into_iter()
        .fold(*s0, |s, r| s.step_word(fold_response(r, s.width)))
}

/// Left fold of [`misr_step`] over the ALU outputs of every cycle.
pub fn compress(trace: &CycleTrace, s0: &MisrState) -> MisrState {
    (0..trace.len()).fold(*s0, |s, i| {
        s.step_word(fold_response(&trace.output_bits(i), s.width))
    })
}

/// Test-data reduction `N·l / 2L` from storing operands instead of per-cycle stimuli.
pub fn compression_ratio(
    cycles_per_op: f64,
    alu_input_bits: u32,
    word_bits: u32,
) -> Result<f64, SignatureError> {
    if word_bits == 0 {
        return Err(SignatureError::InvalidArgument("word_bits must be positive".into()));
    }
    if !(cycles_per_op > 0.0 && cycles_per_op.is_finite()) || alu_input_bits == 0 {
        return Err(SignatureError::InvalidArgument(
            "cycle count and ALU input width must be positive".into(),
        ));
    }
    Ok(cycles_per_op * alu_input_bits as f64 / (2.0 * word_bits as f64))
}

/// Ratio rounded to the nearest integer for display.
pub fn format_ratio(ratio: f64) -> String {
    format!("{}", ratio.round())
}
