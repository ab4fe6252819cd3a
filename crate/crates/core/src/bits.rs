//! Bit-string helpers shared by both solution encodings: standard bit
//! mutation and the length-prefixed hex text form used in run logs.

use fixedbitset::FixedBitSet;
use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};

/// Flips every bit of `bits` independently with probability `1/len`.
///
/// Flip positions are drawn by geometric skipping, so the cost is
/// proportional to the number of flips rather than the length.
pub fn standard_bit_mutation<R: Rng + ?Sized>(bits: &mut FixedBitSet, rng: &mut R) -> usize {
    let len = bits.len();
    if len == 0 {
        return 0;
    }
    let gap = Geometric::new(1.0 / len as f64).expect("probability in (0, 1]");
    let mut flipped = 0;
    let mut pos = gap.sample(rng);
    while pos < len as u64 {
        bits.toggle(pos as usize);
        flipped += 1;
        pos += 1 + gap.sample(rng);
    }
    flipped
}

/// Encodes `bits` as lowercase hex. Bit `i` is the
/// `(3 - i % 4)`-th bit of nibble `i / 4`, so the hex reads in string order.
pub fn to_hex(bits: &FixedBitSet) -> String {
    let nibbles = bits.len().div_ceil(4);
    (0..nibbles)
        .map(|k| {
            let mut v = 0u32;
            for j in 0..4 {
                let i = 4 * k + j;
                if i < bits.len() && bits.contains(i) {
                    v |= 1 << (3 - j);
                }
            }
            char::from_digit(v, 16).unwrap()
        })
        .collect()
}

pub fn from_hex(len: usize, hex: &str) -> Result<FixedBitSet> {
    let hex = hex.trim();
    if hex.len() != len.div_ceil(4) {
        return Err(Error::Solution(format!(
            "expected {} hex digits for {len} bits, got {}",
            len.div_ceil(4),
            hex.len()
        )));
    }
    let mut bits = FixedBitSet::with_capacity(len);
    for (k, c) in hex.chars().enumerate() {
        let v = c.to_digit(16).ok_or_else(|| Error::Solution(format!("invalid hex digit {c:?}")))?;
        for j in 0..4 {
            if v & (1 << (3 - j)) != 0 {
                let i = 4 * k + j;
                if i >= len {
                    return Err(Error::Solution("nonzero padding bits".into()));
                }
                bits.insert(i);
            }
        }
    }
    Ok(bits)
}

pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut bits = FixedBitSet::with_capacity(len);
    for i in ones {
        bits.insert(i);
    }
    bits
}

pub fn random_bits<R: Rng + ?Sized>(len: usize, rng: &mut R) -> FixedBitSet {
    let mut bits = FixedBitSet::with_capacity(len);
    for i in 0..len {
        if rng.random::<bool>() {
            bits.insert(i);
        }
    }
    bits
}
