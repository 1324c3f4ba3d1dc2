//! Bit strings stored one bit per byte (values 0 and 1).
//!
//! Packing into bytes is MSB first. Integers written into bit strings are
//! big-endian.

use crate::{Error, Result};

/// Parses a string of `0`/`1` characters.
pub fn parse(s: &str) -> Result<Vec<u8>> {
    s.bytes()
        .map(|c| match c {
            b'0' => Ok(0),
            b'1' => Ok(1),
            _ => Err(Error::Format(format!("not a bit: {:?}", c as char))),
        })
        .collect()
}

pub fn render(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

pub fn pack(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b != 0 {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

/// Inverse of [`pack`]; `bit_len` may be anything up to `8 * bytes.len()`.
pub fn unpack(bytes: &[u8], bit_len: usize) -> Result<Vec<u8>> {
    if bit_len > bytes.len() * 8 {
        return Err(Error::Format(format!(
            "bit length {bit_len} exceeds {} available bits",
            bytes.len() * 8
        )));
    }
    Ok((0..bit_len)
        .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1)
        .collect())
}

pub fn from_bytes(bytes: &[u8]) -> Vec<u8> {
    (0..bytes.len() * 8)
        .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1)
        .collect()
}

/// Big-endian value of up to 128 bits.
pub fn to_uint(bits: &[u8]) -> u128 {
    debug_assert!(bits.len() <= 128);
    bits.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128)
}

pub fn push_uint(out: &mut Vec<u8>, value: u128, width: usize) {
    for i in (0..width).rev() {
        out.push(((value >> i) & 1) as u8);
    }
}

pub fn uint_bits(value: u128, width: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(width);
    push_uint(&mut out, value, width);
    out
}

/// Big-endian hex, left padded with zero bits to a multiple of four.
pub fn to_hex(bits: &[u8]) -> String {
    let pad = (4 - bits.len() % 4) % 4;
    let mut padded = vec![0u8; pad];
    padded.extend_from_slice(bits);
    padded
        .chunks(4)
        .map(|c| char::from_digit(to_uint(c) as u32, 16).unwrap())
        .collect()
}

/// Inverse of [`to_hex`] for a known bit length.
pub fn from_hex(s: &str, bit_len: usize) -> Result<Vec<u8>> {
    let mut bits = Vec::with_capacity(s.len() * 4);
    for c in s.chars() {
        let d = c
            .to_digit(16)
            .ok_or_else(|| Error::Format(format!("bad hex digit {c:?}")))?;
        push_uint(&mut bits, d as u128, 4);
    }
    if bits.len() < bit_len || bits.len() - bit_len >= 4 {
        return Err(Error::Format(format!(
            "hex string of {} digits does not hold {bit_len} bits",
            s.len()
        )));
    }
    let extra = bits.len() - bit_len;
    if bits[..extra].iter().any(|&b| b != 0) {
        return Err(Error::Format("hex value wider than declared".into()));
    }
    Ok(bits.split_off(extra))
}
