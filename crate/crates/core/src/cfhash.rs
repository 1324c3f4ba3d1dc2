//! Hash functions `{0,1}^p -> {0,1}^q` certified collision free on the
//! length-`p` windows of one string.
//!
//! The hash of `u` is the run of `q` small-bias generator bits starting at
//! virtual index `int(u) * q`, where `int(u)` reads `u` big-endian. With
//! the generator seed `(a, b)` over GF(2^64) that is
//! `h(u)_r = <a^(q int(u) + r), b>` for `r < q`. The power `A = a^(q int(u))`
//! is found by square-and-multiply over the bits of `u`, so indices far
//! beyond 2^64 are fine, and sliding the window by one bit updates `A` with
//! one squaring and at most two multiplications. The map `A -> h` is
//! GF(2)-linear and is tabulated per descriptor.
//!
//! Candidate seeds come from [`Seed::from_counter`] in counter order; the
//! first one whose hash separates all distinct windows is kept.

use std::collections::HashMap;

use crate::gf::{field, Field};
use crate::prg::Seed;
use crate::{clog2, Error, Result};

/// Field width of the hash generator.
pub const HASH_FIELD_BITS: u32 = 64;

/// Candidates tried by [`build_collision_free`] before giving up.
pub const MAX_SEED_ATTEMPTS: u64 = 1024;

/// `q = 4 ⌈log₂ n⌉`, capped at the 64-bit output word.
pub fn hash_width(n: usize) -> usize {
    (4 * clog2(n)).min(64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashDescriptor {
    pub seed: Seed,
    /// Input width in bits.
    pub p: usize,
    /// Output width in bits.
    pub q: usize,
    /// Length of the string the hash was certified for.
    pub n: usize,
}

impl HashDescriptor {
    pub fn new(seed: Seed, p: usize, n: usize) -> Self {
        HashDescriptor { seed, p, q: hash_width(n), n }
    }

    pub fn evaluator(&self) -> HashEvaluator {
        HashEvaluator::new(self)
    }

    /// `CFH v1 n=<n> p=<p> q=<q> seed=<hex>`.
    pub fn to_text(&self) -> String {
        format!(
            "CFH v1 n={} p={} q={} seed={}",
            self.n,
            self.p,
            self.q,
            self.seed.to_hex(HASH_FIELD_BITS)
        )
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        if parts.len() != 6 || parts[0] != "CFH" || parts[1] != "v1" {
            return Err(Error::Format(format!("bad hash descriptor {s:?}")));
        }
        let field_of = |i: usize, key: &str| -> Result<&str> {
            parts[i]
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| Error::Format(format!("expected {key}=..., got {:?}", parts[i])))
        };
        let num = |i: usize, key: &str| -> Result<usize> {
            field_of(i, key)?
                .parse()
                .map_err(|_| Error::Format(format!("bad {key} value")))
        };
        let desc = HashDescriptor {
            n: num(2, "n")?,
            p: num(3, "p")?,
            q: num(4, "q")?,
            seed: Seed::from_hex(field_of(5, "seed")?, HASH_FIELD_BITS)?,
        };
        if desc.q == 0 || desc.q > 64 {
            return Err(Error::Format(format!("hash width {} out of range", desc.q)));
        }
        Ok(desc)
    }
}

/// Precomputed state for evaluating one descriptor.
pub struct HashEvaluator {
    f: &'static Field,
    p: usize,
    /// a^q.
    step: u128,
    /// (a^(q 2^p))^-1, when a ≠ 0.
    drop_inv: Option<u128>,
    /// tables[k][v]: hash contribution of byte k of A having value v.
    tables: Box<[[u64; 256]; 8]>,
}

impl HashEvaluator {
    fn new(desc: &HashDescriptor) -> Self {
        let f = field(HASH_FIELD_BITS);
        let Seed { a, b } = desc.seed;
        let step = f.pow(a, desc.q as u128);
        let mut top = step;
        for _ in 0..desc.p {
            top = f.sqr(top);
        }
        let drop_inv = f.inv(top);
        let mut cols = [0u64; 64];
        let mut ar = 1u128;
        for r in 0..desc.q {
            let mut basis = ar;
            for col in cols.iter_mut() {
                if (basis & b).count_ones() & 1 == 1 {
                    *col |= 1 << r;
                }
                basis = f.mul(basis, 2);
            }
            ar = f.mul(ar, a);
        }
        let mut tables = Box::new([[0u64; 256]; 8]);
        for (k, table) in tables.iter_mut().enumerate() {
            for v in 1..256usize {
                let low = v & v.wrapping_neg();
                let bit = low.trailing_zeros() as usize;
                table[v] = table[v ^ low] ^ cols[8 * k + bit];
            }
        }
        HashEvaluator { f, p: desc.p, step, drop_inv, tables }
    }

    #[inline]
    fn project(&self, a_pow: u128) -> u64 {
        let mut h = 0;
        for k in 0..8 {
            h ^= self.tables[k][((a_pow >> (8 * k)) & 0xff) as usize];
        }
        h
    }

    /// Hash of a `p`-bit input.
    pub fn eval(&self, u: &[u8]) -> Result<u64> {
        if u.len() != self.p {
            return Err(Error::Precondition(format!(
                "hash input has {} bits, expected {}",
                u.len(),
                self.p
            )));
        }
        Ok(self.project(self.f.pow_bits(self.step, u)))
    }

    /// Hashes of every length-`p` window of `s`, indexed by start offset.
    pub fn windows(&self, s: &[u8]) -> Vec<u64> {
        let p = self.p;
        if s.len() < p || p == 0 {
            return Vec::new();
        }
        let count = s.len() - p + 1;
        let mut out = Vec::with_capacity(count);
        match self.drop_inv {
            Some(inv) => {
                let mut acc = self.f.pow_bits(self.step, &s[..p]);
                out.push(self.project(acc));
                for i in 1..count {
                    acc = self.f.sqr(acc);
                    if s[i - 1] != 0 {
                        acc = self.f.mul(acc, inv);
                    }
                    if s[i + p - 1] != 0 {
                        acc = self.f.mul(acc, self.step);
                    }
                    out.push(self.project(acc));
                }
            }
            None => {
                // a^q = 0: the power is 1 on the all-zero window, else 0.
                let mut ones: usize = s[..p].iter().map(|&b| b as usize).sum();
                let zero = self.project(1);
                let other = self.project(0);
                out.push(if ones == 0 { zero } else { other });
                for i in 1..count {
                    ones = ones + s[i + p - 1] as usize - s[i - 1] as usize;
                    out.push(if ones == 0 { zero } else { other });
                }
            }
        }
        out
    }
}

pub fn eval_hash(desc: &HashDescriptor, u: &[u8]) -> Result<u64> {
    desc.evaluator().eval(u)
}

/// True iff equal hashes on windows of `x` imply equal windows.
pub fn verify_collision_free(desc: &HashDescriptor, x: &[u8]) -> bool {
    let hashes = desc.evaluator().windows(x);
    let p = desc.p;
    let mut first: HashMap<u64, usize> = HashMap::with_capacity(hashes.len());
    for (i, &h) in hashes.iter().enumerate() {
        match first.get(&h) {
            Some(&j) => {
                if x[j..j + p] != x[i..i + p] {
                    return false;
                }
            }
            None => {
                first.insert(h, i);
            }
        }
    }
    true
}

/// The first candidate seed whose hash is collision free for `x` at block
/// size `p`, with the number of candidates examined.
pub fn build_collision_free(x: &[u8], p: usize) -> Result<(HashDescriptor, u64)> {
    if p == 0 || p > x.len() {
        return Err(Error::Precondition(format!(
            "block size {p} must be in 1..={}",
            x.len()
        )));
    }
    for counter in 0..MAX_SEED_ATTEMPTS {
        let desc = HashDescriptor::new(Seed::from_counter(counter, HASH_FIELD_BITS), p, x.len());
        if verify_collision_free(&desc, x) {
            return Ok((desc, counter + 1));
        }
    }
    Err(Error::SeedExhausted(MAX_SEED_ATTEMPTS))
}
