//! Test-side references that share no arithmetic with the library: a
//! bit-serial GF(2^m) multiply and schoolbook polynomials over it.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_bits(rng: &mut impl Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

/// GF(2^m) with modulus `x^m + low`, one bit at a time.
#[derive(Clone, Copy, Debug)]
pub struct NaiveField {
    pub m: u32,
    pub low: u128,
}

impl NaiveField {
    pub fn new(m: u32) -> Self {
        NaiveField { m, low: blocksync::gf::field(m).modulus_low() }
    }

    pub fn mul(&self, mut a: u128, mut b: u128) -> u128 {
        let top = 1u128 << (self.m - 1);
        let mask = if self.m == 128 { u128::MAX } else { (1u128 << self.m) - 1 };
        let mut acc = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            let carry = a & top != 0;
            a = (a << 1) & mask;
            if carry {
                a ^= self.low;
            }
        }
        acc
    }

    pub fn pow(&self, a: u128, e: u128) -> u128 {
        let mut r = 1;
        for bit in (0..128).rev() {
            r = self.mul(r, r);
            if (e >> bit) & 1 == 1 {
                r = self.mul(r, a);
            }
        }
        r
    }

    pub fn inv(&self, a: u128) -> u128 {
        // a^(2^m - 2)
        let e = if self.m == 128 { u128::MAX - 1 } else { (1u128 << self.m) - 2 };
        self.pow(a, e)
    }

    /// Coefficients ascending.
    pub fn poly_mul(&self, a: &[u128], b: &[u128]) -> Vec<u128> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] ^= self.mul(x, y);
            }
        }
        out
    }

    pub fn poly_eval(&self, p: &[u128], x: u128) -> u128 {
        p.iter().rev().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }

    /// Remainder of `a` modulo monic `g`.
    pub fn poly_rem(&self, a: &[u128], g: &[u128]) -> Vec<u128> {
        let mut r = a.to_vec();
        let dg = g.len() - 1;
        while r.len() > dg {
            let c = *r.last().unwrap();
            let shift = r.len() - 1 - dg;
            for (i, &gc) in g.iter().enumerate() {
                r[shift + i] ^= self.mul(c, gc);
            }
            r.pop();
        }
        r.resize(dg, 0);
        r
    }

    /// `Π (X - r)` ascending.
    pub fn from_roots(&self, roots: &[u128]) -> Vec<u128> {
        roots.iter().fold(vec![1], |p, &r| self.poly_mul(&p, &[r, 1]))
    }
}

/// Reference systematic RS parity: `X^(d-1) D(X) mod Π_{i=1}^{d-1} (X - 2^i)`.
pub fn reference_parity(f: &NaiveField, data: &[u128], d: usize) -> Vec<u128> {
    let roots: Vec<u128> = (1..d).map(|i| f.pow(2, i as u128)).collect();
    let g = f.from_roots(&roots);
    let mut shifted = vec![0; d - 1];
    shifted.extend_from_slice(data);
    f.poly_rem(&shifted, &g)
}

/// Reference characteristic-polynomial sketch: expand `Π (X - v)` and
/// evaluate at `2^m + j`.
pub fn reference_set_evals(v: &[u128], m: u32, points: usize) -> Vec<u128> {
    let f = NaiveField::new(m + 1);
    let chi = f.from_roots(v);
    (0..points).map(|j| f.poly_eval(&chi, (1u128 << m) + j as u128)).collect()
}
