//! Small-bias bit generator with explicit per-index evaluation.
//!
//! Powering construction: a seed is a pair `(a, b)` of elements of GF(2^m)
//! and output bit `i` (1-based) is the GF(2) inner product `<a^(i-1), b>`
//! of polynomial-basis coordinates. For a nonempty set S of output
//! positions the XOR of those bits is `<p_S(a), b>` with `p_S` a nonzero
//! polynomial of degree below `n_out`, so its bias is at most
//! `(n_out - 1) / 2^m`. A bias bound of ε gives ε-almost κ-wise
//! independence for every κ, so κ does not enter the field size.
//!
//! With `m = ⌈log₂ n_out⌉ + e` for ε = 2^-e the seed length is
//! `d = 2m ≤ c_g (log₂ n_out + log₂(1/ε) + log₂ κ)` with `c_g = 2`
//! (rounding of `log₂ n_out` is absorbed by the κ ≥ 2 term).

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf::{field, Field};
use crate::{bits, clog2, Error, Result};

/// The constant `c_g` in `d ≤ c_g (log₂ n_out + log₂(1/ε) + log₂ κ)`.
pub const SEED_LENGTH_FACTOR: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorParams {
    pub n_out: u64,
    pub kappa: u32,
    /// ε = 2^-eps_log2.
    pub eps_log2: u32,
    m: u32,
}

impl GeneratorParams {
    pub fn new(n_out: u64, kappa: u32, eps_log2: u32) -> Result<Self> {
        if n_out == 0 {
            return Err(Error::Precondition("generator needs n_out >= 1".into()));
        }
        let m = clog2(n_out as usize) as u32 + eps_log2;
        if m > 127 {
            return Err(Error::Precondition(format!(
                "field width {m} exceeds 127 (n_out = {n_out}, eps = 2^-{eps_log2})"
            )));
        }
        Ok(GeneratorParams { n_out, kappa, eps_log2, m })
    }

    /// Width of the field the seed halves live in.
    pub fn field_bits(&self) -> u32 {
        self.m
    }

    /// Seed length `d` in bits.
    pub fn seed_length(&self) -> usize {
        SEED_LENGTH_FACTOR * self.m as usize
    }

    /// `(n_out - 1) / 2^m`, the proven bias bound.
    pub fn bias_bound(&self) -> f64 {
        (self.n_out - 1) as f64 / 2f64.powi(self.m as i32)
    }
}

/// Seed length for the given parameters; monotone in each argument's
/// demand (larger `n_out`, smaller ε).
pub fn seed_length(n_out: u64, kappa: u32, eps_log2: u32) -> Result<usize> {
    Ok(GeneratorParams::new(n_out, kappa, eps_log2)?.seed_length())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub a: u128,
    pub b: u128,
}

impl Seed {
    /// The candidate seed with enumeration index `counter`. Candidates are
    /// tried in counter order from 0; each counter is expanded through a
    /// ChaCha8 stream so that early candidates are not degenerate.
    pub fn from_counter(counter: u64, m: u32) -> Seed {
        let mut rng = ChaCha8Rng::seed_from_u64(counter);
        let mask = if m == 128 { u128::MAX } else { (1u128 << m) - 1 };
        let mut draw = || (((rng.next_u64() as u128) << 64) | rng.next_u64() as u128) & mask;
        let a = draw();
        let b = draw();
        Seed { a, b }
    }

    /// `a` then `b`, each as `m` big-endian bits.
    pub fn to_bits(&self, m: u32) -> Vec<u8> {
        let mut out = bits::uint_bits(self.a, m as usize);
        bits::push_uint(&mut out, self.b, m as usize);
        out
    }

    pub fn from_bits(b: &[u8], m: u32) -> Result<Seed> {
        let m = m as usize;
        if b.len() != 2 * m {
            return Err(Error::Format(format!("seed has {} bits, expected {}", b.len(), 2 * m)));
        }
        Ok(Seed { a: bits::to_uint(&b[..m]), b: bits::to_uint(&b[m..]) })
    }

    /// Big-endian hex of the `2m`-bit seed.
    pub fn to_hex(&self, m: u32) -> String {
        bits::to_hex(&self.to_bits(m))
    }

    pub fn from_hex(s: &str, m: u32) -> Result<Seed> {
        Seed::from_bits(&bits::from_hex(s, 2 * m as usize)?, m)
    }
}

#[derive(Debug, Clone)]
pub struct Generator {
    params: GeneratorParams,
    field: &'static Field,
    seed: Seed,
}

impl Generator {
    pub fn new(params: GeneratorParams, seed: Seed) -> Result<Self> {
        let f = field(params.m);
        if !f.contains(seed.a) || !f.contains(seed.b) {
            return Err(Error::OutOfRange(format!("seed wider than {} bits", params.m)));
        }
        Ok(Generator { params, field: f, seed })
    }

    pub fn params(&self) -> &GeneratorParams {
        &self.params
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    #[inline]
    fn bit_of(&self, power: u128) -> u8 {
        ((power & self.seed.b).count_ones() & 1) as u8
    }

    /// Output bit at 1-based `index`.
    pub fn eval_bit(&self, index: u64) -> Result<u8> {
        if index < 1 || index > self.params.n_out {
            return Err(Error::OutOfRange(format!(
                "generator index {index} outside 1..={}",
                self.params.n_out
            )));
        }
        Ok(self.bit_of(self.field.pow(self.seed.a, (index - 1) as u128)))
    }

    /// Output bits `start .. start + len` (1-based start).
    pub fn eval_window(&self, start: u64, len: usize) -> Result<Vec<u8>> {
        if len == 0 {
            return Ok(Vec::new());
        }
        let last = start + len as u64 - 1;
        if start < 1 || last > self.params.n_out {
            return Err(Error::OutOfRange(format!(
                "generator window [{start}, {last}] outside 1..={}",
                self.params.n_out
            )));
        }
        let mut p = self.field.pow(self.seed.a, (start - 1) as u128);
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.bit_of(p));
            p = self.field.mul(p, self.seed.a);
        }
        Ok(out)
    }
}
