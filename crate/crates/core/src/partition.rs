//! Locally consistent partition of a string with no two equal adjacent
//! symbols.
//!
//! Nodes of a parsing forest are built level by level. A node whose leaf
//! span reaches the threshold `T` is finished and passes through unchanged.
//! Each maximal run of unfinished nodes is relabelled by two rounds of
//! alphabet reduction, cut at landmarks (local maxima, then local minima not
//! next to a maximum), and every piece becomes one node of the next level
//! labelled by its first leaf. The loop stops once no two unfinished nodes
//! are adjacent; each remaining unfinished node joins the finished node on
//! its left, or on its right when it is first.

use crate::{clog2, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolString {
    pub symbols: Vec<u64>,
    /// Symbols are below `2^sigma_bits`.
    pub sigma_bits: u32,
}

impl SymbolString {
    pub fn new(symbols: Vec<u64>, sigma_bits: u32) -> Result<Self> {
        if sigma_bits < 64 && symbols.iter().any(|&s| s >> sigma_bits != 0) {
            return Err(Error::OutOfRange(format!("symbol wider than {sigma_bits} bits")));
        }
        Ok(SymbolString { symbols, sigma_bits })
    }
}

fn check_non_repetitive(a: &[u64]) -> Result<()> {
    if let Some(i) = a.windows(2).position(|w| w[0] == w[1]) {
        return Err(Error::Precondition(format!(
            "symbols {} and {} are equal and adjacent",
            i,
            i + 1
        )));
    }
    Ok(())
}

/// One round of alphabet reduction: `A'[i] = 2l + bit(l, A[i])` where `l`
/// is the lowest bit in which `A[i]` and `A[i-1]` differ. Before `A[0]`
/// sits the symbol 0, or 1 if `A[0]` is 0.
pub fn reduce_symbols(a: &[u64]) -> Result<Vec<u64>> {
    check_non_repetitive(a)?;
    let mut prev = match a.first() {
        Some(0) => 1,
        _ => 0,
    };
    Ok(a.iter()
        .map(|&s| {
            let l = (s ^ prev).trailing_zeros() as u64;
            prev = s;
            2 * l + ((s >> l) & 1)
        })
        .collect())
}

pub fn alphabet_reduce(a: &SymbolString) -> Result<SymbolString> {
    Ok(SymbolString {
        symbols: reduce_symbols(&a.symbols)?,
        sigma_bits: clog2(2 * a.sigma_bits.max(1) as usize) as u32,
    })
}

/// Landmark positions, 0-based. Only positions 2..=len-2 (the 1-based
/// range `[3, n-1]`) qualify.
pub fn landmarks(a: &[u64]) -> Result<Vec<usize>> {
    check_non_repetitive(a)?;
    let n = a.len();
    if n < 4 {
        return Ok(Vec::new());
    }
    let mut is_max = vec![false; n];
    for i in 2..n - 1 {
        is_max[i] = a[i - 1] < a[i] && a[i] > a[i + 1];
    }
    let mut out = Vec::new();
    for i in 2..n - 1 {
        if is_max[i] {
            out.push(i);
        } else if a[i - 1] > a[i] && a[i] < a[i + 1] && !is_max[i - 1] && !is_max[i + 1] {
            out.push(i);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionBoundaries {
    /// `0 = i_0 < i_1 < … < i_last = n`, 0-based block starts plus the end.
    pub indices: Vec<usize>,
    pub threshold: usize,
    /// Levels built before halting.
    pub levels: usize,
}

impl PartitionBoundaries {
    pub fn block_count(&self) -> usize {
        self.indices.len().saturating_sub(1)
    }

    /// `(start, end)` of each block.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.indices.windows(2).map(|w| (w[0], w[1]))
    }

    /// Block containing position `p`.
    pub fn block_of(&self, p: usize) -> usize {
        self.indices.partition_point(|&i| i <= p) - 1
    }

    /// LEB128 varints of the successive differences.
    pub fn to_varints(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut prev = 0;
        for &i in &self.indices {
            let mut d = (i - prev) as u64;
            prev = i;
            loop {
                let byte = (d & 0x7f) as u8;
                d >>= 7;
                if d == 0 {
                    out.push(byte);
                    break;
                }
                out.push(byte | 0x80);
            }
        }
        out
    }

    pub fn from_varints(bytes: &[u8], threshold: usize) -> Result<Self> {
        let mut indices = Vec::new();
        let (mut cur, mut acc, mut shift) = (0usize, 0u64, 0u32);
        for &b in bytes {
            if shift > 63 {
                return Err(Error::Format("varint too long".into()));
            }
            acc |= ((b & 0x7f) as u64) << shift;
            shift += 7;
            if b & 0x80 == 0 {
                cur += acc as usize;
                if !indices.is_empty() && acc == 0 {
                    return Err(Error::Format("boundaries not strictly increasing".into()));
                }
                indices.push(cur);
                acc = 0;
                shift = 0;
            }
        }
        if shift != 0 {
            return Err(Error::Format("truncated varint".into()));
        }
        Ok(PartitionBoundaries { indices, threshold, levels: 0 })
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    start: usize,
    end: usize,
    label: u64,
}

pub fn partition(t: usize, x: &SymbolString) -> Result<PartitionBoundaries> {
    partition_symbols(t, &x.symbols)
}

pub fn partition_symbols(t: usize, x: &[u64]) -> Result<PartitionBoundaries> {
    if t == 0 {
        return Err(Error::Precondition("threshold must be positive".into()));
    }
    check_non_repetitive(x)?;
    let n = x.len();
    if n == 0 {
        return Ok(PartitionBoundaries { indices: vec![0], threshold: t, levels: 0 });
    }
    let mut nodes: Vec<Node> = x
        .iter()
        .enumerate()
        .map(|(i, &s)| Node { start: i, end: i + 1, label: s })
        .collect();
    let mut levels = 0;
    loop {
        let finish: Vec<bool> = nodes.iter().map(|v| v.end - v.start >= t).collect();
        if !finish.windows(2).any(|w| !w[0] && !w[1]) {
            let mut indices = vec![0];
            let mut seen_finish = false;
            for (v, &f) in nodes.iter().zip(&finish) {
                if f {
                    if seen_finish {
                        indices.push(v.start);
                    }
                    seen_finish = true;
                }
            }
            indices.push(n);
            return Ok(PartitionBoundaries { indices, threshold: t, levels });
        }
        let mut next = Vec::with_capacity(nodes.len() / 2 + 1);
        let mut j = 0;
        while j < nodes.len() {
            if finish[j] {
                next.push(nodes[j]);
                j += 1;
                continue;
            }
            let mut e = j;
            while e < nodes.len() && !finish[e] {
                e += 1;
            }
            let run = &nodes[j..e];
            let labels: Vec<u64> = run.iter().map(|v| v.label).collect();
            let reduced = reduce_symbols(&reduce_symbols(&labels)?)?;
            let mut cuts = vec![0];
            cuts.extend(landmarks(&reduced)?);
            cuts.push(run.len());
            for w in cuts.windows(2) {
                next.push(Node {
                    start: run[w[0]].start,
                    end: run[w[1] - 1].end,
                    label: run[w[0]].label,
                });
            }
            j = e;
        }
        nodes = next;
        levels += 1;
    }
}

/// Locality radius in blocks: `100 ⌈log₂ T⌉`.
pub fn block_window(t: usize) -> usize {
    100 * clog2(t.max(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_worked_example() {
        // 5 = 101, 7 = 111: lowest differing bit 1, value 1.
        assert_eq!(reduce_symbols(&[5, 7]).unwrap()[1], 3);
    }

    #[test]
    fn reduction_keeps_alternation_distinct() {
        let a: Vec<u64> = (0..20).map(|i| i % 2).collect();
        let r = reduce_symbols(&a).unwrap();
        assert_eq!(r.len(), a.len());
        assert!(r.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn repetitive_input_rejected() {
        assert!(reduce_symbols(&[1, 2, 2]).is_err());
        assert!(landmarks(&[3, 3]).is_err());
        assert!(partition_symbols(4, &[1, 1]).is_err());
    }

    #[test]
    fn landmark_range() {
        assert_eq!(landmarks(&[1, 3, 2, 1, 0]).unwrap(), Vec::<usize>::new());
        assert!(landmarks(&[0, 1, 2, 3, 4, 5]).unwrap().is_empty());
        assert_eq!(landmarks(&[0, 1, 5, 2, 3]).unwrap(), vec![2]);
    }

    #[test]
    fn short_input_is_one_block() {
        let p = partition_symbols(10, &[4, 1, 7, 2]).unwrap();
        assert_eq!(p.indices, vec![0, 4]);
    }

    #[test]
    fn varint_round_trip() {
        let p = PartitionBoundaries { indices: vec![0, 5, 300, 70000], threshold: 3, levels: 0 };
        let q = PartitionBoundaries::from_varints(&p.to_varints(), 3).unwrap();
        assert_eq!(q.indices, p.indices);
    }

    #[test]
    fn window_formula() {
        assert_eq!(block_window(2), 100);
        assert_eq!(block_window(64), 600);
    }
}
