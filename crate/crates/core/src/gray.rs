//! Binary reflected Gray code labels.

use crate::error::{invalid, Result};

/// Label width for `count` symbols.
pub fn bits_for(count: usize) -> u32 {
    if count <= 1 {
        0
    } else {
        usize::BITS - (count - 1).leading_zeros()
    }
}

#[inline]
pub fn gray_encode(index: u64) -> u64 {
    index ^ (index >> 1)
}

#[inline]
pub fn gray_decode(code: u64) -> u64 {
    let mut x = code;
    let mut shift = 1;
    while shift < 64 {
        x ^= x >> shift;
        shift <<= 1;
    }
    x
}

/// BRGC bit string of `index`, most significant bit first.
pub fn gray_map(index: u64, bits: u32) -> Result<Vec<u8>> {
    if bits > 63 || index >= (1u64 << bits) {
        return Err(invalid("index", format!("{index} does not fit in {bits} bits")));
    }
    let code = gray_encode(index);
    Ok((0..bits).rev().map(|b| ((code >> b) & 1) as u8).collect())
}

/// Inverse of [`gray_map`].
pub fn gray_unmap(bits: &[u8]) -> Result<u64> {
    if bits.len() > 63 {
        return Err(invalid("bits", "at most 63 bits"));
    }
    let mut code = 0u64;
    for &b in bits {
        if b > 1 {
            return Err(invalid("bits", format!("not a bit: {b}")));
        }
        code = (code << 1) | b as u64;
    }
    Ok(gray_decode(code))
}
