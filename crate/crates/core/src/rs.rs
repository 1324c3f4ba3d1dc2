//! Systematic Reed-Solomon codes over GF(2^m), m ≤ 64.
//!
//! A data vector `D` of length `n` with design distance `d` is stored as
//! the codeword polynomial `c(X) = X^(d-1) D(X) + R(X)`, where
//! `R = X^(d-1) D mod g` and `g(X) = (X - α)(X - α²)…(X - α^(d-1))` with
//! `α = x`, a primitive element of every field this crate builds for
//! `m ≤ 64`. Data symbol `i` sits at degree `d - 1 + i`, parity symbol `j`
//! at degree `j`. Only the parity `R` is transmitted.
//!
//! Decoding handles errors and erasures: `2e + f < d`.

use crate::gf::{field, poly, Field};
use crate::{clog2, Error, Result};

/// Largest field width accepted for Reed-Solomon symbols.
pub const MAX_RS_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolVector {
    pub symbols: Vec<u128>,
    /// Field width; every symbol is below 2^m.
    pub m: u32,
}

impl SymbolVector {
    pub fn new(symbols: Vec<u128>, m: u32) -> Result<Self> {
        if m == 0 || m > MAX_RS_BITS {
            return Err(Error::OutOfRange(format!("symbol width {m} outside 1..=64")));
        }
        if let Some(s) = symbols.iter().find(|&&s| s >> m != 0) {
            return Err(Error::OutOfRange(format!("symbol {s:#x} wider than {m} bits")));
        }
        Ok(SymbolVector { symbols, m })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// `max(symbol_bits, ⌈log₂(n + d)⌉)`: the smallest width that holds the
/// payload and gives `n + d - 1` distinct codeword positions.
pub fn rs_field_bits(symbol_bits: u32, n: usize, d: usize) -> u32 {
    symbol_bits.max(clog2(n + d.max(1)) as u32).max(1)
}

fn check_length(m: u32, n: usize, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::Precondition("design distance must be at least 1".into()));
    }
    if m > MAX_RS_BITS {
        return Err(Error::OutOfRange(format!("symbol width {m} exceeds 64")));
    }
    let total = (n + d - 1) as u128;
    if total > (1u128 << m) - 1 {
        return Err(Error::TooLarge(format!(
            "codeword length {total} exceeds 2^{m} - 1; raise the symbol width"
        )));
    }
    Ok(())
}

/// Generator polynomial `Π (X - α^i)` for `i = 1..d-1`, ascending.
pub fn generator(f: &Field, d: usize) -> Vec<u128> {
    let mut g = vec![1u128];
    let mut root = 1u128;
    for _ in 1..d {
        root = f.mul(root, 2);
        let mut next = vec![0u128; g.len() + 1];
        for (i, &c) in g.iter().enumerate() {
            next[i + 1] ^= c;
            next[i] ^= f.mul(c, root);
        }
        g = next;
    }
    g
}

/// The `d - 1` parity symbols for `data`.
pub fn rs_parity(data: &SymbolVector, d: usize) -> Result<SymbolVector> {
    check_length(data.m, data.len(), d)?;
    let f = field(data.m);
    let g = generator(f, d);
    let r = d - 1;
    let mut rem = vec![0u128; r];
    // Shift register division of X^r D(X) by g, highest degree first.
    for &s in data.symbols.iter().rev() {
        let top = if r == 0 { s } else { s ^ rem[r - 1] };
        for j in (1..r).rev() {
            rem[j] = rem[j - 1] ^ f.mul(top, g[j]);
        }
        if r > 0 {
            rem[0] = f.mul(top, g[0]);
        }
    }
    Ok(SymbolVector { symbols: rem, m: data.m })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub data: SymbolVector,
    pub parity: SymbolVector,
    /// Symbols changed that were not flagged as erasures.
    pub errors: usize,
    pub erasures: usize,
}

/// Decode with no erasures.
pub fn rs_correct(received: &SymbolVector, parity: &SymbolVector, d: usize) -> Result<SymbolVector> {
    Ok(rs_decode(received, parity, d, &[])?.data)
}

/// Errors-and-erasures decoding. Erasure `i < n` names data symbol `i`;
/// `n + j` names parity symbol `j`. Erased values are ignored.
pub fn rs_decode(
    received: &SymbolVector,
    parity: &SymbolVector,
    d: usize,
    erasures: &[usize],
) -> Result<Decoded> {
    let m = received.m;
    let n = received.len();
    check_length(m, n, d)?;
    if parity.m != m || parity.len() != d - 1 {
        return Err(Error::Precondition(format!(
            "parity has {} symbols of {} bits, expected {} of {m}",
            parity.len(),
            parity.m,
            d - 1
        )));
    }
    let f = field(m);
    let r = d - 1;
    let total = n + r;
    let deg_of = |idx: usize| if idx < n { r + idx } else { idx - n };
    let mut word = vec![0u128; total];
    word[..r].copy_from_slice(&parity.symbols);
    word[r..].copy_from_slice(&received.symbols);

    let mut erased: Vec<usize> = Vec::with_capacity(erasures.len());
    for &e in erasures {
        if e >= total {
            return Err(Error::OutOfRange(format!("erasure index {e} beyond {total}")));
        }
        let pos = deg_of(e);
        if !erased.contains(&pos) {
            erased.push(pos);
        }
    }
    let nf = erased.len();
    if nf > r {
        return Err(Error::DecodeFailed(format!("{nf} erasures exceed capacity {r}")));
    }
    for &pos in &erased {
        word[pos] = 0;
    }

    let syn = syndromes(f, &word, r);
    if syn.iter().all(|&s| s == 0) {
        return Ok(finish(word, n, r, m, 0, nf));
    }

    let alpha_pow = |e: usize| f.pow(2, e as u128);
    // Erasure locator Γ(X) = Π (1 - α^pos X).
    let mut gamma = vec![1u128];
    for &pos in &erased {
        let xp = alpha_pow(pos);
        gamma = poly::mul(f, &gamma, &[1, xp]);
    }

    let mut lambda = gamma.clone();
    let mut b = gamma;
    let mut l = nf;
    for step in nf..r {
        let mut delta = 0u128;
        for (i, &c) in lambda.iter().enumerate() {
            if i > step {
                break;
            }
            delta ^= f.mul(c, syn[step - i]);
        }
        let xb: Vec<u128> = std::iter::once(0).chain(b.iter().copied()).collect();
        if delta == 0 {
            b = xb;
        } else if 2 * l <= step + nf {
            let t = poly::add(&lambda, &poly::scale(f, &xb, delta));
            let inv = f.inv(delta).expect("nonzero discrepancy");
            b = poly::scale(f, &lambda, inv);
            lambda = t;
            l = step + 1 + nf - l;
        } else {
            lambda = poly::add(&lambda, &poly::scale(f, &xb, delta));
            b = xb;
        }
    }
    poly::trim(&mut lambda);
    let deg = poly::degree(&lambda).unwrap_or(0);
    if deg != l || 2 * (l - nf) + nf > r {
        return Err(Error::DecodeFailed(format!(
            "locator degree {deg} inconsistent with {l} errata"
        )));
    }

    // Ω = S Λ mod X^r.
    let mut omega = poly::mul(f, &syn, &lambda);
    omega.truncate(r);
    let dlambda = poly::derivative(&lambda);

    let inv_alpha = f.inv(2).expect("x is invertible");
    let mut roots = Vec::with_capacity(deg);
    let mut xinv = 1u128;
    for pos in 0..total {
        if poly::eval(f, &lambda, xinv) == 0 {
            roots.push((pos, xinv));
        }
        xinv = f.mul(xinv, inv_alpha);
    }
    if roots.len() != deg {
        return Err(Error::DecodeFailed(format!(
            "found {} locator roots among codeword positions, expected {deg}",
            roots.len()
        )));
    }
    let mut errors = 0;
    for (pos, xinv) in roots {
        let den = poly::eval(f, &dlambda, xinv);
        let Some(mag) = f.div(poly::eval(f, &omega, xinv), den) else {
            return Err(Error::DecodeFailed("repeated locator root".into()));
        };
        if mag != 0 && !erased.contains(&pos) {
            errors += 1;
        }
        word[pos] ^= mag;
    }
    if syndromes(f, &word, r).iter().any(|&s| s != 0) {
        return Err(Error::DecodeFailed("nonzero syndrome after correction".into()));
    }
    Ok(finish(word, n, r, m, errors, nf))
}

fn finish(word: Vec<u128>, n: usize, r: usize, m: u32, errors: usize, erasures: usize) -> Decoded {
    let parity = SymbolVector { symbols: word[..r].to_vec(), m };
    let data = SymbolVector { symbols: word[r..r + n].to_vec(), m };
    Decoded { data, parity, errors, erasures }
}

/// `S_j = c(α^(j+1))` for `j < r`.
fn syndromes(f: &Field, word: &[u128], r: usize) -> Vec<u128> {
    let mut out = Vec::with_capacity(r);
    let mut point = 1u128;
    for _ in 0..r {
        point = f.mul(point, 2);
        out.push(poly::eval(f, word, point));
    }
    out
}
