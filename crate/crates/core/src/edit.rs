//! The block edit model: insertions and deletions of contiguous runs of
//! bits, and transpositions of whole substrings.
//!
//! Positions are 1-based. `Transpose { i, l, j }` removes `x[i, i+l)` and
//! reinserts it immediately after the original symbol `x[j]` (`j = 0` means
//! the front), with `j ∈ [0, i-1] ∪ [i+l, n]`. Both boundary choices are
//! accepted: `j = i-1` leaves the string unchanged, while `j = i+l` swaps
//! the block with the single symbol that followed it.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BlockEditOp {
    /// Insert `payload` so that it starts at position `pos` (`1..=n+1`).
    Insert { pos: usize, payload: Vec<u8> },
    /// Delete `x[pos, pos+len)`.
    Delete { pos: usize, len: usize },
    /// Move `x[i, i+l)` to just after the original `x[j]`.
    Transpose { i: usize, l: usize, j: usize },
}

impl BlockEditOp {
    /// Bits inserted or deleted; transpositions are free.
    pub fn bit_cost(&self) -> usize {
        match self {
            BlockEditOp::Insert { payload, .. } => payload.len(),
            BlockEditOp::Delete { len, .. } => *len,
            BlockEditOp::Transpose { .. } => 0,
        }
    }

    /// Checks the operation against a string of length `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidOperation(msg));
        match *self {
            BlockEditOp::Insert { pos, ref payload } => {
                if payload.is_empty() {
                    return bad("insert payload is empty".into());
                }
                if payload.iter().any(|&b| b > 1) {
                    return bad("insert payload is not a bit string".into());
                }
                if pos < 1 || pos > n + 1 {
                    return bad(format!("insert position {pos} outside 1..={}", n + 1));
                }
            }
            BlockEditOp::Delete { pos, len } => {
                if len == 0 {
                    return bad("delete length is zero".into());
                }
                if pos < 1 || pos + len > n + 1 {
                    return bad(format!("delete [{pos}, {}) exceeds length {n}", pos + len));
                }
            }
            BlockEditOp::Transpose { i, l, j } => {
                if l == 0 {
                    return bad("transpose length is zero".into());
                }
                if i < 1 || i + l > n + 1 {
                    return bad(format!("transpose block [{i}, {}) exceeds length {n}", i + l));
                }
                if (j >= i && j < i + l) || j > n {
                    return bad(format!(
                        "transpose destination {j} not in [0, {}] or [{}, {n}]",
                        i - 1,
                        i + l
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: &[u8]) -> Result<Vec<u8>> {
        self.validate(x.len())?;
        Ok(match *self {
            BlockEditOp::Insert { pos, ref payload } => {
                let mut out = Vec::with_capacity(x.len() + payload.len());
                out.extend_from_slice(&x[..pos - 1]);
                out.extend_from_slice(payload);
                out.extend_from_slice(&x[pos - 1..]);
                out
            }
            BlockEditOp::Delete { pos, len } => {
                let mut out = Vec::with_capacity(x.len() - len);
                out.extend_from_slice(&x[..pos - 1]);
                out.extend_from_slice(&x[pos - 1 + len..]);
                out
            }
            BlockEditOp::Transpose { i, l, j } => {
                let block = &x[i - 1..i - 1 + l];
                let mut rest = Vec::with_capacity(x.len());
                rest.extend_from_slice(&x[..i - 1]);
                rest.extend_from_slice(&x[i - 1 + l..]);
                let at = if j < i { j } else { j - l };
                let mut out = Vec::with_capacity(x.len());
                out.extend_from_slice(&rest[..at]);
                out.extend_from_slice(block);
                out.extend_from_slice(&rest[at..]);
                out
            }
        })
    }
}

/// An ordered list of operations with the budgets it must respect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEditTrace {
    pub ops: Vec<BlockEditOp>,
    pub k_budget: usize,
    pub t_budget: usize,
}

impl BlockEditTrace {
    pub fn new(ops: Vec<BlockEditOp>, k_budget: usize, t_budget: usize) -> Self {
        BlockEditTrace { ops, k_budget, t_budget }
    }

    pub fn bit_cost(&self) -> usize {
        self.ops.iter().map(BlockEditOp::bit_cost).sum()
    }

    pub fn check_budget(&self) -> Result<()> {
        if self.ops.len() > self.k_budget {
            return Err(Error::BudgetExceeded(format!(
                "{} operations, budget {}",
                self.ops.len(),
                self.k_budget
            )));
        }
        let t = self.bit_cost();
        if t > self.t_budget {
            return Err(Error::BudgetExceeded(format!(
                "{t} bits inserted or deleted, budget {}",
                self.t_budget
            )));
        }
        Ok(())
    }

    /// Sum of transposed block lengths.
    pub fn moved_bits(&self) -> usize {
        self.ops
            .iter()
            .map(|op| match op {
                BlockEditOp::Transpose { l, .. } => *l,
                _ => 0,
            })
            .sum()
    }

    pub fn apply(&self, x: &[u8]) -> Result<Vec<u8>> {
        self.check_budget()?;
        let mut cur = x.to_vec();
        for (idx, op) in self.ops.iter().enumerate() {
            cur = op.apply(&cur).map_err(|e| match e {
                Error::InvalidOperation(msg) => Error::InvalidOperation(format!("op {idx}: {msg}")),
                other => other,
            })?;
        }
        Ok(cur)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty trace".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "TRACE" || parts[1] != "v1" {
            return Err(Error::Format(format!("bad trace header {header:?}")));
        }
        let k_budget = parse_kv(parts[2], "k")?;
        let t_budget = parse_kv(parts[3], "t")?;
        let mut ops = Vec::new();
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<usize> {
                s.parse()
                    .map_err(|_| Error::Format(format!("bad number {s:?} in {line:?}")))
            };
            let op = match f.as_slice() {
                ["I", pos, bits] => BlockEditOp::Insert {
                    pos: num(pos)?,
                    payload: crate::bits::parse(bits)?,
                },
                ["D", pos, len] => BlockEditOp::Delete { pos: num(pos)?, len: num(len)? },
                ["T", i, l, j] => BlockEditOp::Transpose { i: num(i)?, l: num(l)?, j: num(j)? },
                _ => return Err(Error::Format(format!("bad trace line {line:?}"))),
            };
            ops.push(op);
        }
        Ok(BlockEditTrace { ops, k_budget, t_budget })
    }
}

fn parse_kv(field: &str, key: &str) -> Result<usize> {
    field
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Format(format!("expected {key}=<n>, got {field:?}")))
}

impl fmt::Display for BlockEditTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TRACE v1 k={} t={}", self.k_budget, self.t_budget)?;
        for op in &self.ops {
            match op {
                BlockEditOp::Insert { pos, payload } => {
                    writeln!(f, "I {pos} {}", crate::bits::render(payload))?
                }
                BlockEditOp::Delete { pos, len } => writeln!(f, "D {pos} {len}")?,
                BlockEditOp::Transpose { i, l, j } => writeln!(f, "T {i} {l} {j}")?,
            }
        }
        Ok(())
    }
}

/// A random trace of `k` operations against a string of length `n`.
///
/// Operation kinds are uniform over those still possible. Insertion and
/// deletion lengths are geometric with mean about `t / k`, capped by the
/// remaining bit budget. Transposed blocks have uniform length.
pub fn sample_trace(seed: u64, n: usize, k: usize, t: usize) -> BlockEditTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = (t as f64 / k.max(1) as f64).max(1.0);
    let geo = Geometric::new(1.0 / mean).expect("probability in (0, 1]");
    let mut ops = Vec::with_capacity(k);
    let mut len = n;
    let mut left = t;
    for _ in 0..k {
        let mut kinds = Vec::with_capacity(3);
        if left > 0 {
            kinds.push(0);
            if len > 0 {
                kinds.push(1);
            }
        }
        if len >= 2 {
            kinds.push(2);
        }
        if kinds.is_empty() {
            break;
        }
        let op = match kinds[rng.random_range(0..kinds.len())] {
            0 => {
                let size = (1 + geo.sample(&mut rng) as usize).min(left);
                let payload = (0..size).map(|_| rng.random_range(0..2u8)).collect();
                BlockEditOp::Insert { pos: rng.random_range(1..=len + 1), payload }
            }
            1 => {
                let size = (1 + geo.sample(&mut rng) as usize).min(left).min(len);
                BlockEditOp::Delete { pos: rng.random_range(1..=len - size + 1), len: size }
            }
            _ => {
                let l = rng.random_range(1..len);
                let i = rng.random_range(1..=len - l + 1);
                // Every destination except the identity j = i-1.
                let mut dests: Vec<usize> = (0..i - 1).chain(i + l..=len).collect();
                if dests.is_empty() {
                    dests.push(i - 1);
                }
                BlockEditOp::Transpose { i, l, j: dests[rng.random_range(0..dests.len())] }
            }
        };
        left -= op.bit_cost();
        len = len + match &op {
            BlockEditOp::Insert { payload, .. } => payload.len(),
            _ => 0,
        } - match &op {
            BlockEditOp::Delete { len, .. } => *len,
            _ => 0,
        };
        ops.push(op);
    }
    BlockEditTrace::new(ops, k, t)
}

/// Length of a longest common subsequence.
pub fn lcs_len(x: &[u8], y: &[u8]) -> usize {
    let mut prev = vec![0usize; y.len() + 1];
    let mut cur = vec![0usize; y.len() + 1];
    for &a in x {
        for (j, &b) in y.iter().enumerate() {
            cur[j + 1] = if a == b { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[y.len()]
}

/// Insertion/deletion distance, `|x| + |y| - 2 LCS(x, y)`.
pub fn edit_distance(x: &[u8], y: &[u8]) -> usize {
    x.len() + y.len() - 2 * lcs_len(x, y)
}

/// Every string reachable from `x` with at most `k` operations and at
/// most `t` inserted or deleted bits, including `x` itself.
pub fn enumerate_ball(x: &[u8], k: usize, t: usize) -> Result<BTreeSet<Vec<u8>>> {
    if x.len() > 12 || k > 2 || t > 4 {
        return Err(Error::TooLarge(format!(
            "ball enumeration limited to |x| <= 12, k <= 2, t <= 4 (got {}, {k}, {t})",
            x.len()
        )));
    }
    Ok(ball_unchecked(x, k, t))
}

/// [`enumerate_ball`] without the size guard, for callers that bound the
/// work themselves.
pub(crate) fn ball_unchecked(x: &[u8], k: usize, t: usize) -> BTreeSet<Vec<u8>> {
    // Minimum bits spent to reach each string with the ops used so far.
    let mut reached: HashMap<Vec<u8>, usize> = HashMap::new();
    reached.insert(x.to_vec(), 0);
    let mut frontier = reached.clone();
    for _ in 0..k {
        let mut next: HashMap<Vec<u8>, usize> = HashMap::new();
        for (s, &used) in &frontier {
            for_each_neighbor(s, t - used, |r, cost| {
                let spent = used + cost;
                let better = |e: &usize| spent < *e;
                if reached.get(&r).is_none_or(better) && next.get(&r).is_none_or(better) {
                    next.insert(r, spent);
                }
            });
        }
        for (s, used) in &next {
            reached.insert(s.clone(), *used);
        }
        frontier = next;
    }
    reached.into_keys().collect()
}

fn for_each_neighbor(s: &[u8], budget: usize, mut emit: impl FnMut(Vec<u8>, usize)) {
    let n = s.len();
    for size in 1..=budget {
        for word in 0..1usize << size {
            let payload: Vec<u8> = (0..size).rev().map(|b| ((word >> b) & 1) as u8).collect();
            for pos in 1..=n + 1 {
                let op = BlockEditOp::Insert { pos, payload: payload.clone() };
                emit(op.apply(s).unwrap(), size);
            }
        }
        for pos in 1..=n.saturating_sub(size - 1) {
            if pos + size <= n + 1 {
                emit(BlockEditOp::Delete { pos, len: size }.apply(s).unwrap(), size);
            }
        }
    }
    for i in 1..=n {
        for l in 1..=n + 1 - i {
            for j in (0..i).chain(i + l..=n) {
                emit(BlockEditOp::Transpose { i, l, j }.apply(s).unwrap(), 0);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{parse, render};

    #[test]
    fn transpose_matches_worked_example() {
        let x = parse("110010").unwrap();
        let y = BlockEditOp::Transpose { i: 1, l: 2, j: 4 }.apply(&x).unwrap();
        assert_eq!(render(&y), "001110");
    }

    #[test]
    fn boundary_destinations() {
        let x = parse("1100101").unwrap();
        let y = BlockEditOp::Transpose { i: 3, l: 2, j: 2 }.apply(&x).unwrap();
        assert_eq!(y, x);
        let y = BlockEditOp::Transpose { i: 3, l: 2, j: 5 }.apply(&x).unwrap();
        assert_eq!(render(&y), "1110001");
    }

    #[test]
    fn destination_inside_block_is_rejected() {
        let x = parse("110010").unwrap();
        let err = BlockEditOp::Transpose { i: 2, l: 3, j: 3 }.apply(&x).unwrap_err();
        assert!(matches!(err, Error::InvalidOperation(_)));
    }

    #[test]
    fn insert_and_delete() {
        let x = parse("0110").unwrap();
        let op = BlockEditOp::Insert { pos: 5, payload: parse("11").unwrap() };
        assert_eq!(render(&op.apply(&x).unwrap()), "011011");
        let op = BlockEditOp::Delete { pos: 2, len: 2 };
        assert_eq!(render(&op.apply(&x).unwrap()), "00");
        assert!(BlockEditOp::Delete { pos: 4, len: 2 }.apply(&x).is_err());
    }

    #[test]
    fn ball_of_single_zero() {
        let ball = enumerate_ball(&[0], 1, 1).unwrap();
        let got: Vec<String> = ball.iter().map(|s| render(s)).collect();
        assert_eq!(got, vec!["", "0", "00", "01", "10"]);
    }

    #[test]
    fn ball_guard() {
        assert!(matches!(enumerate_ball(&[0; 13], 1, 1), Err(Error::TooLarge(_))));
    }

    #[test]
    fn edit_distance_small_cases() {
        assert_eq!(edit_distance(&parse("0101").unwrap(), &parse("1010").unwrap()), 2);
        assert_eq!(edit_distance(&[], &parse("111").unwrap()), 3);
    }

    #[test]
    fn trace_text_round_trip() {
        let trace = BlockEditTrace::new(
            vec![
                BlockEditOp::Insert { pos: 3, payload: parse("101").unwrap() },
                BlockEditOp::Delete { pos: 1, len: 2 },
                BlockEditOp::Transpose { i: 2, l: 3, j: 0 },
            ],
            3,
            5,
        );
        let text = trace.to_text();
        assert!(text.starts_with("TRACE v1 k=3 t=5\nI 3 101\nD 1 2\nT 2 3 0\n"));
        assert_eq!(BlockEditTrace::from_text(&text).unwrap(), trace);
    }

    #[test]
    fn over_budget_trace_is_rejected() {
        let trace = BlockEditTrace::new(vec![BlockEditOp::Delete { pos: 1, len: 3 }], 1, 2);
        assert!(matches!(trace.apply(&[0; 8]), Err(Error::BudgetExceeded(_))));
    }
}
