//! Binary extension fields GF(2^m) for 1 ≤ m ≤ 127.
//!
//! Elements are `u128` values holding polynomial-basis coordinates. The
//! modulus is x^m + r(x) with r the first sparse polynomial (trinomial,
//! then pentanomial, middle terms of degree ≤ m/2) that passes the field
//! test. For m ≤ 64 the test additionally requires x to be a generator of
//! the multiplicative group, so `x = 2` can serve as a primitive element.

use std::sync::OnceLock;

#[derive(Debug, Clone)]
pub struct Field {
    m: u32,
    mask: u128,
    low: u128,
    terms: Vec<u32>,
    primitive: bool,
}

const EMPTY: OnceLock<Field> = OnceLock::new();
static FIELDS: [OnceLock<Field>; 128] = [EMPTY; 128];

/// The cached field of width `m`.
///
/// # Panics
/// If `m` is 0 or larger than 127.
pub fn field(m: u32) -> &'static Field {
    assert!((1..=127).contains(&m), "field width {m} out of range");
    FIELDS[m as usize].get_or_init(|| Field::search(m))
}

impl Field {
    fn with_low(m: u32, low: u128) -> Field {
        let terms = (0..m).filter(|e| (low >> e) & 1 == 1).collect();
        Field {
            m,
            mask: (1u128 << m) - 1,
            low,
            terms,
            primitive: false,
        }
    }

    fn search(m: u32) -> Field {
        let want_primitive = m <= 64;
        let factors = if want_primitive {
            prime_factors(if m == 64 { u64::MAX } else { (1u64 << m) - 1 })
        } else {
            Vec::new()
        };
        let accept = |low: u128| -> Option<Field> {
            let mut f = Field::with_low(m, low);
            if !f.is_irreducible() {
                return None;
            }
            if want_primitive {
                if !f.x_is_generator(&factors) {
                    return None;
                }
                f.primitive = true;
            }
            Some(f)
        };
        if m == 1 {
            let mut f = Field::with_low(1, 1);
            f.primitive = true;
            return f;
        }
        let half = (m / 2).max(1);
        for a in 1..=half {
            if let Some(f) = accept((1u128 << a) | 1) {
                return f;
            }
        }
        for a in 3..=half {
            for b in 2..a {
                for c in 1..b {
                    if let Some(f) = accept((1u128 << a) | (1u128 << b) | (1u128 << c) | 1) {
                        return f;
                    }
                }
            }
        }
        panic!("no sparse modulus found for GF(2^{m})");
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// The low part r(x) of the modulus x^m + r(x).
    pub fn modulus_low(&self) -> u128 {
        self.low
    }

    /// Whether x (the element 2) generates the multiplicative group.
    pub fn x_is_primitive(&self) -> bool {
        self.primitive
    }

    /// Number of nonzero elements, 2^m - 1.
    pub fn order_minus_one(&self) -> u128 {
        self.mask
    }

    pub fn contains(&self, a: u128) -> bool {
        a & !self.mask == 0
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        if self.m <= 64 {
            self.reduce_narrow(clmul64(a as u64, b as u64))
        } else {
            let (hi, lo) = clmul128(a, b);
            self.reduce_wide(hi, lo)
        }
    }

    #[inline]
    pub fn sqr(&self, a: u128) -> u128 {
        self.mul(a, a)
    }

    #[inline]
    fn times_low(&self, h: u128) -> u128 {
        let mut acc = 0;
        for &e in &self.terms {
            acc ^= h << e;
        }
        acc
    }

    #[inline]
    fn reduce_narrow(&self, mut v: u128) -> u128 {
        loop {
            let h = v >> self.m;
            if h == 0 {
                return v;
            }
            v = (v & self.mask) ^ self.times_low(h);
        }
    }

    fn reduce_wide(&self, mut hi: u128, mut lo: u128) -> u128 {
        let m = self.m;
        loop {
            let h = (lo >> m) | (hi << (128 - m));
            if h == 0 {
                return lo;
            }
            lo &= self.mask;
            hi = 0;
            for &e in &self.terms {
                lo ^= h << e;
                if e > 0 {
                    hi ^= h >> (128 - e);
                }
            }
        }
    }

    pub fn pow(&self, a: u128, mut e: u128) -> u128 {
        let mut base = a;
        let mut acc = 1u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.sqr(base);
            e >>= 1;
        }
        acc
    }

    /// `a` raised to an exponent given as big-endian bits.
    pub fn pow_bits(&self, a: u128, exp_bits: &[u8]) -> u128 {
        let mut acc = 1u128;
        for &b in exp_bits {
            acc = self.sqr(acc);
            if b != 0 {
                acc = self.mul(acc, a);
            }
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u128) -> Option<u128> {
        if a == 0 {
            return None;
        }
        // a^(2^m - 2) via the chain a^(2^i - 1).
        let mut t = a;
        for _ in 1..self.m - 1 {
            t = self.mul(self.sqr(t), a);
        }
        Some(if self.m == 1 { 1 } else { self.sqr(t) })
    }

    pub fn div(&self, a: u128, b: u128) -> Option<u128> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// Ben-Or test on x^m + r(x), using this field's own reduction.
    fn is_irreducible(&self) -> bool {
        let full_deg = self.m;
        let x = 2u128;
        let mut g = x;
        for _ in 0..self.m / 2 {
            g = self.sqr(g);
            if gf2_poly_gcd_with_modulus(g ^ x, self.low, full_deg) != 1 {
                return false;
            }
        }
        true
    }

    fn x_is_generator(&self, factors: &[u64]) -> bool {
        let order = self.mask as u64;
        factors.iter().all(|&p| self.pow(2, (order / p) as u128) != 1)
    }
}

/// gcd over GF(2) of `a` (degree < m) and x^m + low, returned as bits.
fn gf2_poly_gcd_with_modulus(a: u128, low: u128, m: u32) -> u128 {
    let mut x = (1u128 << m) | low;
    let mut y = a;
    while y != 0 {
        let r = gf2_poly_mod(x, y);
        x = y;
        y = r;
    }
    x
}

fn gf2_poly_mod(mut a: u128, b: u128) -> u128 {
    let db = 127 - b.leading_zeros();
    while a != 0 {
        let da = 127 - a.leading_zeros();
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

static HW_CLMUL: OnceLock<bool> = OnceLock::new();

#[inline]
fn has_hw_clmul() -> bool {
    *HW_CLMUL.get_or_init(|| {
        #[cfg(target_arch = "x86_64")]
        {
            std::arch::is_x86_feature_detected!("pclmulqdq")
        }
        #[cfg(not(target_arch = "x86_64"))]
        {
            false
        }
    })
}

/// Carry-less product of two 64-bit polynomials.
#[inline]
pub fn clmul64(a: u64, b: u64) -> u128 {
    #[cfg(target_arch = "x86_64")]
    {
        if has_hw_clmul() {
            // SAFETY: the CPU feature was detected at runtime.
            return unsafe { clmul64_hw(a, b) };
        }
    }
    clmul64_sw(a, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq,sse2")]
unsafe fn clmul64_hw(a: u64, b: u64) -> u128 {
    use std::arch::x86_64::{_mm_clmulepi64_si128, _mm_set_epi64x};
    let r = _mm_clmulepi64_si128(_mm_set_epi64x(0, a as i64), _mm_set_epi64x(0, b as i64), 0);
    // SAFETY: __m128i and u128 have the same size; lane 0 is the low half.
    std::mem::transmute::<_, u128>(r)
}

/// Portable reference for [`clmul64`].
pub fn clmul64_sw(a: u64, b: u64) -> u128 {
    let mut table = [0u128; 16];
    for i in 1..16usize {
        let mut v = 0u128;
        for bit in 0..4 {
            if (i >> bit) & 1 == 1 {
                v ^= (a as u128) << bit;
            }
        }
        table[i] = v;
    }
    let mut acc = 0u128;
    for nib in (0..16).rev() {
        acc = (acc << 4) ^ table[((b >> (4 * nib)) & 0xf) as usize];
    }
    acc
}

/// Carry-less product of two 128-bit polynomials as (high, low) halves.
#[inline]
fn clmul128(a: u128, b: u128) -> (u128, u128) {
    let (a0, a1) = (a as u64, (a >> 64) as u64);
    let (b0, b1) = (b as u64, (b >> 64) as u64);
    let p00 = clmul64(a0, b0);
    let p11 = clmul64(a1, b1);
    let mid = clmul64(a0 ^ a1, b0 ^ b1) ^ p00 ^ p11;
    (p11 ^ (mid >> 64), p00 ^ (mid << 64))
}

/// Textbook shift-and-add product, independent of [`Field::mul`].
pub fn mul_reference(f: &Field, mut a: u128, mut b: u128) -> u128 {
    let top = 1u128 << (f.m - 1);
    let mut acc = 0u128;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        let carry = a & top != 0;
        a = (a << 1) & f.mask;
        if carry {
            a ^= f.low;
        }
    }
    acc
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
    }
    let mut stack = vec![n];
    while let Some(v) = stack.pop() {
        if v == 1 {
            continue;
        }
        if is_prime(v) {
            if !out.contains(&v) {
                out.push(v);
            }
            continue;
        }
        let d = pollard_rho(v);
        stack.push(d);
        stack.push(v / d);
    }
    out.sort_unstable();
    out
}

fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    a %= n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, n);
        }
        a = mulmod(a, a, n);
        e >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

/// Polynomials over a [`Field`], stored as ascending coefficient vectors.
/// The zero polynomial is the empty vector.
pub mod poly {
    use super::Field;

    pub fn trim(p: &mut Vec<u128>) {
        while p.last() == Some(&0) {
            p.pop();
        }
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(p: &[u128]) -> Option<usize> {
        p.iter().rposition(|&c| c != 0)
    }

    pub fn eval(f: &Field, p: &[u128], x: u128) -> u128 {
        p.iter().rev().fold(0, |acc, &c| f.mul(acc, x) ^ c)
    }

    pub fn add(a: &[u128], b: &[u128]) -> Vec<u128> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, &c) in a.iter().enumerate() {
            out[i] ^= c;
        }
        for (i, &c) in b.iter().enumerate() {
            out[i] ^= c;
        }
        trim(&mut out);
        out
    }

    pub fn mul(f: &Field, a: &[u128], b: &[u128]) -> Vec<u128> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &ca) in a.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in b.iter().enumerate() {
                out[i + j] ^= f.mul(ca, cb);
            }
        }
        trim(&mut out);
        out
    }

    pub fn scale(f: &Field, a: &[u128], s: u128) -> Vec<u128> {
        let mut out: Vec<u128> = a.iter().map(|&c| f.mul(c, s)).collect();
        trim(&mut out);
        out
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(f: &Field, a: &[u128], b: &[u128]) -> (Vec<u128>, Vec<u128>) {
        let db = degree(b).expect("division by the zero polynomial");
        let lead_inv = f.inv(b[db]).unwrap();
        let mut r: Vec<u128> = a.to_vec();
        trim(&mut r);
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![0; r.len() - db];
        for i in (db..r.len()).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            let coef = f.mul(c, lead_inv);
            q[i - db] = coef;
            for j in 0..=db {
                r[i - db + j] ^= f.mul(coef, b[j]);
            }
        }
        r.truncate(db);
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }

    pub fn rem(f: &Field, a: &[u128], b: &[u128]) -> Vec<u128> {
        divrem(f, a, b).1
    }

    pub fn monic(f: &Field, a: &[u128]) -> Vec<u128> {
        match degree(a) {
            None => Vec::new(),
            Some(d) => scale(f, &a[..=d], f.inv(a[d]).unwrap()),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(f: &Field, a: &[u128], b: &[u128]) -> Vec<u128> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(f, &x, &y);
            x = y;
            y = r;
        }
        monic(f, &x)
    }

    /// Formal derivative (characteristic 2: odd-degree terms survive).
    pub fn derivative(a: &[u128]) -> Vec<u128> {
        let mut out: Vec<u128> = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
            .collect();
        trim(&mut out);
        out
    }

    /// Product of (x - r) over the given roots.
    pub fn from_roots(f: &Field, roots: &[u128]) -> Vec<u128> {
        let mut p = vec![1u128];
        for &r in roots {
            let mut next = vec![0u128; p.len() + 1];
            for (i, &c) in p.iter().enumerate() {
                next[i + 1] ^= c;
                next[i] ^= f.mul(c, r);
            }
            p = next;
        }
        p
    }

    /// `a * b mod m`.
    pub fn mulmod(f: &Field, a: &[u128], b: &[u128], m: &[u128]) -> Vec<u128> {
        rem(f, &mul(f, a, b), m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields_match_known_moduli() {
        assert_eq!(field(2).modulus_low(), 0b11);
        assert_eq!(field(3).modulus_low(), 0b11);
        assert_eq!(field(4).modulus_low(), 0b11);
        for m in 1..=64 {
            assert!(field(m).x_is_primitive(), "m = {m}");
        }
    }

    #[test]
    fn multiplicative_group_of_gf16_is_cyclic() {
        let f = field(4);
        let mut seen = std::collections::HashSet::new();
        let mut a = 1u128;
        for _ in 0..15 {
            seen.insert(a);
            a = f.mul(a, 2);
        }
        assert_eq!(a, 1);
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn software_clmul_matches_dispatch() {
        let pairs = [(0u64, 5u64), (u64::MAX, u64::MAX), (0x1234_5678_9abc_def0, 0xfedc_ba98_7654_3210)];
        for (a, b) in pairs {
            assert_eq!(clmul64(a, b), clmul64_sw(a, b));
        }
    }

    #[test]
    fn inverse_round_trip_across_widths() {
        for m in [1u32, 7, 13, 32, 63, 64, 65, 99, 127] {
            let f = field(m);
            let a = 0x9e37_79b9_7f4a_7c15_f39c_c060_5ced_c834u128 & f.order_minus_one();
            let a = if a == 0 { 1 } else { a };
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "m = {m}");
        }
    }
}
