//! Flat binary format for truth tables.
//!
//! Layout: `n` as a little-endian `u32`, then the `2^n` table bits packed
//! LSB-first into bytes (entry `i` is bit `i % 8` of byte `i / 8`), zero padded
//! to a whole byte.

use std::io::{Read, Write};

use super::{BitVector, BooleanFunction, MAX_TABLE_VARS};
use crate::error::{capacity, Error, Result};

/// Packs bits LSB-first into bytes, independent of the in-memory word size.
pub fn pack_bits(bits: &BitVector) -> Vec<u8> {
    let mut out = Vec::with_capacity(bits.len().div_ceil(8));
    for word in bits.words() {
        out.extend_from_slice(&word.to_le_bytes());
    }
    out.truncate(bits.len().div_ceil(8));
    out
}

/// Inverse of [`pack_bits`]. Padding bits beyond `len` must be zero.
pub fn unpack_bits(len: usize, bytes: &[u8]) -> Result<BitVector> {
    if bytes.len() != len.div_ceil(8) {
        return Err(Error::Parse(format!(
            "expected {} bytes for {len} bits, found {}",
            len.div_ceil(8),
            bytes.len()
        )));
    }
    let words: Vec<u64> = bytes
        .chunks(8)
        .map(|chunk| {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            u64::from_le_bytes(buf)
        })
        .collect();
    let v = BitVector::from_words(len, words.clone());
    if v.words() != words.as_slice() {
        return Err(Error::Parse("nonzero padding bits".into()));
    }
    Ok(v)
}

pub fn write_truth_table<W: Write>(f: &BooleanFunction, mut out: W) -> Result<()> {
    let table = f.truth_table()?;
    out.write_all(&(f.n() as u32).to_le_bytes())?;
    out.write_all(&pack_bits(&table))?;
    Ok(())
}

pub fn read_truth_table<R: Read>(mut input: R) -> Result<BooleanFunction> {
    let mut header = [0u8; 4];
    input.read_exact(&mut header)?;
    let n = u32::from_le_bytes(header) as usize;
    if n > MAX_TABLE_VARS {
        return Err(capacity(format!("truth table on {n} variables"), MAX_TABLE_VARS as u64));
    }
    let len = 1usize << n;
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    BooleanFunction::from_truth_table(n, unpack_bits(len, &body)?)
}
