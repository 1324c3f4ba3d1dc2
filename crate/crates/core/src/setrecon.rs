//! Set reconciliation from characteristic-polynomial evaluations.
//!
//! Elements are `m`-bit integers, viewed in GF(2^(m+1)). The sketch of `V`
//! is `χ_V(a_j) = Π_{v ∈ V} (a_j - v)` at the fixed points
//! `a_j = 2^m + j`, `j < 2D`, which can never be elements, plus `|V|`.
//! Given `V'` with `|V Δ V'| ≤ D`, the ratio `χ_V / χ_V'` is a rational
//! function `P/Q` whose numerator and denominator have known degree
//! difference and total degree at most `D`. It is interpolated from the
//! evaluation ratios, reduced, and factored into its roots.

use crate::gf::{field, poly, Field};
use crate::{Error, Result};

/// Widest element supported (the field needs one extra bit).
pub const MAX_ELEMENT_BITS: u32 = 126;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSketch {
    pub evals: Vec<u128>,
    /// Symmetric-difference capacity D.
    pub capacity: usize,
    /// Element width.
    pub m: u32,
    /// |V|.
    pub count: u64,
}

impl SetSketch {
    pub fn field_bits(&self) -> u32 {
        self.m + 1
    }

    /// Size of the serialized sketch: the evaluations plus a 64-bit count.
    pub fn bit_size(&self) -> usize {
        self.evals.len() * self.field_bits() as usize + 64
    }
}

/// The `j`-th evaluation point for `m`-bit elements.
pub fn eval_point(m: u32, j: usize) -> u128 {
    (1u128 << m) + j as u128
}

fn check_elements(v: &[u128], m: u32) -> Result<()> {
    if m == 0 || m > MAX_ELEMENT_BITS {
        return Err(Error::OutOfRange(format!("element width {m} outside 1..=126")));
    }
    if let Some(x) = v.iter().find(|&&x| x >> m != 0) {
        return Err(Error::OutOfRange(format!("element {x:#x} wider than {m} bits")));
    }
    let mut sorted = v.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Precondition("set elements must be distinct".into()));
    }
    Ok(())
}

fn char_evals(f: &Field, v: &[u128], m: u32, points: usize) -> Vec<u128> {
    (0..points)
        .map(|j| {
            let a = eval_point(m, j);
            v.iter().fold(1u128, |acc, &x| f.mul(acc, a ^ x))
        })
        .collect()
}

pub fn set_recon_sketch(v: &[u128], m: u32, capacity: usize) -> Result<SetSketch> {
    if capacity == 0 {
        return Err(Error::Precondition("capacity must be at least 1".into()));
    }
    check_elements(v, m)?;
    let f = field(m + 1);
    Ok(SetSketch {
        evals: char_evals(f, v, m, 2 * capacity),
        capacity,
        m,
        count: v.len() as u64,
    })
}

/// Elements of `V \ V'` and of `V' \ V`, each sorted.
pub fn set_difference(sketch: &SetSketch, v_prime: &[u128]) -> Result<(Vec<u128>, Vec<u128>)> {
    let m = sketch.m;
    let cap = sketch.capacity;
    check_elements(v_prime, m)?;
    if cap == 0 || sketch.evals.len() != 2 * cap {
        return Err(Error::Format(format!(
            "set sketch has {} evaluations for capacity {cap}",
            sketch.evals.len()
        )));
    }
    let f = field(m + 1);
    let delta = sketch.count as i64 - v_prime.len() as i64;
    if delta.unsigned_abs() as usize > cap {
        return Err(Error::ReconcileFailed(format!(
            "set sizes differ by {delta}, capacity {cap}"
        )));
    }
    let mine = char_evals(f, v_prime, m, 2 * cap);
    let mut total = cap;
    if (total as i64 - delta) % 2 != 0 {
        total += 1;
    }
    let dp = ((total as i64 + delta) / 2) as usize;
    let dq = ((total as i64 - delta) / 2) as usize;

    // Unknowns: p_0..p_{dp-1}, q_0..q_{dq-1}; one equation per point:
    // c Σ p_i a^i + e Σ q_i a^i = e a^dq + c a^dp.
    let mut rows: Vec<Vec<u128>> = Vec::with_capacity(total);
    for j in 0..total {
        let a = eval_point(m, j);
        let (e, c) = (sketch.evals[j], mine[j]);
        let mut row = Vec::with_capacity(total + 1);
        let mut ap = 1u128;
        for _ in 0..dp {
            row.push(f.mul(c, ap));
            ap = f.mul(ap, a);
        }
        let a_dp = ap;
        let mut aq = 1u128;
        for _ in 0..dq {
            row.push(f.mul(e, aq));
            aq = f.mul(aq, a);
        }
        row.push(f.mul(e, aq) ^ f.mul(c, a_dp));
        rows.push(row);
    }
    let sol = solve(f, rows, total).ok_or_else(|| {
        Error::ReconcileFailed("interpolation system is inconsistent".into())
    })?;
    let mut p: Vec<u128> = sol[..dp].to_vec();
    p.push(1);
    let mut q: Vec<u128> = sol[dp..].to_vec();
    q.push(1);

    for j in total..2 * cap {
        let a = eval_point(m, j);
        let lhs = f.mul(mine[j], poly::eval(f, &p, a));
        let rhs = f.mul(sketch.evals[j], poly::eval(f, &q, a));
        if lhs != rhs {
            return Err(Error::ReconcileFailed(format!(
                "interpolant disagrees at check point {j}"
            )));
        }
    }

    let g = poly::gcd(f, &p, &q);
    let p0 = poly::divrem(f, &p, &g).0;
    let q0 = poly::divrem(f, &q, &g).0;
    let added = roots(f, &p0, m)
        .ok_or_else(|| Error::ReconcileFailed("numerator does not split into elements".into()))?;
    let removed = roots(f, &q0, m)
        .ok_or_else(|| Error::ReconcileFailed("denominator does not split into elements".into()))?;
    if added.len() + removed.len() > cap {
        return Err(Error::ReconcileFailed(format!(
            "difference {} exceeds capacity {cap}",
            added.len() + removed.len()
        )));
    }
    let mut have = v_prime.to_vec();
    have.sort_unstable();
    if added.iter().any(|x| have.binary_search(x).is_ok())
        || removed.iter().any(|x| have.binary_search(x).is_err())
    {
        return Err(Error::ReconcileFailed("recovered difference inconsistent with local set".into()));
    }
    Ok((added, removed))
}

/// Recover V from its sketch and a local set V'. Result is sorted.
pub fn set_recon_recover(sketch: &SetSketch, v_prime: &[u128]) -> Result<Vec<u128>> {
    let (added, removed) = set_difference(sketch, v_prime)?;
    let mut out: Vec<u128> = v_prime
        .iter()
        .copied()
        .filter(|x| removed.binary_search(x).is_err())
        .chain(added)
        .collect();
    out.sort_unstable();
    if out.len() as u64 != sketch.count {
        return Err(Error::ReconcileFailed(format!(
            "recovered {} elements, sketch says {}",
            out.len(),
            sketch.count
        )));
    }
    Ok(out)
}

/// Gaussian elimination on an augmented `rows x (n+1)` system. Free
/// variables are set to zero; `None` if inconsistent.
fn solve(f: &Field, mut rows: Vec<Vec<u128>>, n: usize) -> Option<Vec<u128>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = f.inv(rows[r][col]).unwrap();
        for c in col..=n {
            rows[r][c] = f.mul(rows[r][c], inv);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let factor = rows[i][col];
                for c in col..=n {
                    let v = f.mul(factor, rows[r][c]);
                    rows[i][c] ^= v;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| row[n] != 0) {
        return None;
    }
    let mut sol = vec![0u128; n];
    for (i, &col) in pivots.iter().enumerate() {
        sol[col] = rows[i][n];
    }
    Some(sol)
}

/// Roots of a monic polynomial if it is a product of distinct linear
/// factors whose roots are `m`-bit elements.
fn roots(f: &Field, p: &[u128], m: u32) -> Option<Vec<u128>> {
    let deg = poly::degree(p)?;
    if deg == 0 {
        return Some(Vec::new());
    }
    let x = poly::rem(f, &[0, 1], p);
    let mut t = x.clone();
    for _ in 0..f.m() {
        t = poly::mulmod(f, &t, &t, p);
    }
    if t != x {
        return None;
    }
    let mut out = Vec::with_capacity(deg);
    split(f, p.to_vec(), &mut out);
    out.sort_unstable();
    if out.iter().any(|&r| r >> m != 0) {
        return None;
    }
    Some(out)
}

/// Split a squarefree, fully split monic polynomial with trace maps.
fn split(f: &Field, p: Vec<u128>, out: &mut Vec<u128>) {
    match poly::degree(&p) {
        None | Some(0) => {}
        Some(1) => out.push(f.div(p[0], p[1]).unwrap()),
        Some(deg) => {
            for i in 0..f.m() {
                let beta = 1u128 << i;
                let u0 = poly::rem(f, &[0, beta], &p);
                let mut u = u0.clone();
                let mut tr = u0;
                for _ in 1..f.m() {
                    u = poly::mulmod(f, &u, &u, &p);
                    tr = poly::add(&tr, &u);
                }
                let g = poly::gcd(f, &p, &tr);
                let dg = poly::degree(&g).unwrap_or(0);
                if dg > 0 && dg < deg {
                    let rest = poly::divrem(f, &p, &g).0;
                    split(f, g, out);
                    split(f, rest, out);
                    return;
                }
            }
            unreachable!("trace maps over a basis separate distinct roots");
        }
    }
}
