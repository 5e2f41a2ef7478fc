//! LSB-first bit vectors shared by the trace, netlist and signature code.

use std::fmt;

/// An ordered bit vector; index 0 is the least significant bit of the first field.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new() -> Self {
        Bits(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        Bits(vec![false; len])
    }

    /// The low `width` bits of `value`, LSB first.
    pub fn from_u64(value: u64, width: u32) -> Self {
        let mut bits = Bits::new();
        bits.push_u64(value, width);
        bits
    }

    /// Appends the low `width` bits of `value`, LSB first.
    pub fn push_u64(&mut self, value: u64, width: u32) {
        for i in 0..width {
            self.0.push(value >> i & 1 == 1);
        }
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> bool {
        self.0[index]
    }

    pub fn set(&mut self, index: usize, value: bool) {
        self.0[index] = value;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    /// Packs `width` bits starting at `offset` into an integer, LSB first.
    pub fn field(&self, offset: usize, width: usize) -> u64 {
        assert!(width <= 64);
        (0..width).fold(0u64, |acc, i| acc | (self.0[offset + i] as u64) << i)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }
}

impl From<Vec<bool>> for Bits {
    fn from(v: Vec<bool>) -> Self {
        Bits(v)
    }
}

impl FromIterator<bool> for Bits {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Bits(iter.into_iter().collect())
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lsb_first_packing() {
        let b = Bits::from_u64(0b1101, 4);
        assert_eq!(b.to_string(), "1011");
        assert_eq!(b.field(0, 4), 0b1101);
        assert_eq!(b.field(1, 2), 0b10);
    }
}
