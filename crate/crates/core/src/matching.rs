//! Matchings between aligned blocks of x and arbitrary windows of y.
//!
//! A pair `(i, j)` says block `x[i, i+p)` (with `i` a multiple of `p`) is
//! believed equal to `y[j, j+p)` because their hashes agree. Only the hash
//! values of the x-blocks are needed, so the functions here take a list of
//! block numbers with their target values rather than x itself.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::cfhash::HashDescriptor;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    /// `(x_start, y_start)` pairs, 0-based.
    pub pairs: Vec<(usize, usize)>,
    pub p: usize,
    /// Upper bound on how many pair intervals cover one y position.
    pub degree_bound: usize,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Largest number of intervals `[j, j+p)` covering a single y position.
    pub fn max_degree(&self) -> usize {
        let mut events: Vec<(usize, i32)> = Vec::with_capacity(2 * self.pairs.len());
        for &(_, j) in &self.pairs {
            events.push((j, 1));
            events.push((j + self.p, -1));
        }
        events.sort_unstable();
        let (mut cur, mut best) = (0i32, 0i32);
        for (_, d) in events {
            cur += d;
            best = best.max(cur);
        }
        best as usize
    }
}

/// Hash values of every length-`p` window of `y`.
pub fn window_hashes(y: &[u8], h: &HashDescriptor) -> Vec<u64> {
    h.evaluator().windows(y)
}

/// One greedy round over precomputed window hashes.
///
/// Blocks are scanned in increasing block number; each takes the smallest
/// y position whose hash equals its target and whose window does not
/// overlap a window already taken in this round.
pub fn greedy_round(
    p: usize,
    blocks: &[usize],
    targets: &[u64],
    y_hashes: &[u64],
) -> Vec<(usize, usize)> {
    assert_eq!(blocks.len(), targets.len());
    let wanted: HashSet<u64> = targets.iter().copied().collect();
    let mut positions: HashMap<u64, Vec<usize>> = HashMap::new();
    for (j, h) in y_hashes.iter().enumerate() {
        if wanted.contains(h) {
            positions.entry(*h).or_default().push(j);
        }
    }
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by_key(|&k| blocks[k]);
    let mut cursor: HashMap<u64, usize> = HashMap::new();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut out = Vec::new();
    for k in order {
        let target = targets[k];
        let Some(list) = positions.get(&target) else {
            continue;
        };
        // A candidate that is blocked now stays blocked for the rest of the
        // round, so each hash value keeps a monotone cursor.
        let c = cursor.entry(target).or_insert(0);
        while *c < list.len() {
            let j = list[*c];
            *c += 1;
            let lo = j.saturating_sub(p - 1);
            if used.range(lo..j + p).next().is_none() {
                used.insert(j);
                out.push((blocks[k] * p, j));
                break;
            }
        }
    }
    out
}

/// Greedy non-overlapping matching; maximal, and at least a third of the
/// optimum.
pub fn greedy_one_third(
    blocks: &[usize],
    targets: &[u64],
    y: &[u8],
    h: &HashDescriptor,
) -> Matching {
    let pairs = greedy_round(h.p, blocks, targets, &window_hashes(y, h));
    Matching { pairs, p: h.p, degree_bound: 1 }
}

/// Three greedy rounds, each over the blocks still unmatched and against
/// all of y. Overlap degree at most 3, size at least 19/27 of the optimum.
pub fn degree3_two_thirds(
    blocks: &[usize],
    targets: &[u64],
    y: &[u8],
    h: &HashDescriptor,
) -> Matching {
    degree3_with_hashes(h.p, blocks, targets, &window_hashes(y, h))
}

pub fn degree3_with_hashes(
    p: usize,
    blocks: &[usize],
    targets: &[u64],
    y_hashes: &[u64],
) -> Matching {
    let mut pairs = Vec::new();
    let mut left_blocks = blocks.to_vec();
    let mut left_targets = targets.to_vec();
    for _ in 0..3 {
        if left_blocks.is_empty() {
            break;
        }
        let round = greedy_round(p, &left_blocks, &left_targets, y_hashes);
        let matched: HashSet<usize> = round.iter().map(|&(i, _)| i / p).collect();
        pairs.extend(round);
        let (b, t): (Vec<usize>, Vec<u64>) = left_blocks
            .iter()
            .zip(&left_targets)
            .filter(|(b, _)| !matched.contains(b))
            .map(|(&b, &t)| (b, t))
            .unzip();
        left_blocks = b;
        left_targets = t;
    }
    Matching { pairs, p, degree_bound: 3 }
}

/// Maximum-cardinality non-overlapping matching by exhaustive search.
/// Limited to 12 blocks and 24 candidate pairs.
pub fn brute_force_opt(
    blocks: &[usize],
    targets: &[u64],
    y: &[u8],
    h: &HashDescriptor,
) -> Result<Matching> {
    if blocks.len() > 12 {
        return Err(Error::TooLarge(format!("{} blocks, limit 12", blocks.len())));
    }
    let p = h.p;
    let hashes = window_hashes(y, h);
    let cands: Vec<Vec<usize>> = targets
        .iter()
        .map(|t| (0..hashes.len()).filter(|&j| hashes[j] == *t).collect())
        .collect();
    let total: usize = cands.iter().map(Vec::len).sum();
    if total > 24 {
        return Err(Error::TooLarge(format!("{total} candidate pairs, limit 24")));
    }
    struct Search<'a> {
        p: usize,
        cands: &'a [Vec<usize>],
        chosen: Vec<(usize, usize)>,
        best: Vec<(usize, usize)>,
    }
    impl Search<'_> {
        fn go(&mut self, k: usize) {
            let reachable = self.cands[k..].iter().filter(|c| !c.is_empty()).count();
            if self.chosen.len() + reachable <= self.best.len() {
                return;
            }
            if k == self.cands.len() {
                self.best = self.chosen.clone();
                return;
            }
            for idx in 0..self.cands[k].len() {
                let j = self.cands[k][idx];
                if self.chosen.iter().all(|&(_, c)| c + self.p <= j || j + self.p <= c) {
                    self.chosen.push((k, j));
                    self.go(k + 1);
                    self.chosen.pop();
                }
            }
            self.go(k + 1);
        }
    }
    let mut search = Search { p, cands: &cands, chosen: Vec::new(), best: Vec::new() };
    search.go(0);
    let pairs = search.best.iter().map(|&(k, j)| (blocks[k] * p, j)).collect();
    Ok(Matching { pairs, p, degree_bound: 1 })
}

/// True if no unmatched block has a candidate window disjoint from every
/// matched window.
pub fn is_maximal(
    w: &Matching,
    blocks: &[usize],
    targets: &[u64],
    y: &[u8],
    h: &HashDescriptor,
) -> bool {
    let p = h.p;
    let hashes = window_hashes(y, h);
    let matched: HashSet<usize> = w.pairs.iter().map(|&(i, _)| i / p).collect();
    for (b, t) in blocks.iter().zip(targets) {
        if matched.contains(b) {
            continue;
        }
        for (j, hj) in hashes.iter().enumerate() {
            if hj == t && w.pairs.iter().all(|&(_, c)| c + p <= j || j + p <= c) {
                return false;
            }
        }
    }
    true
}

/// Pairs whose substrings differ.
pub fn count_wrong_matches(w: &Matching, x: &[u8], y: &[u8]) -> usize {
    let p = w.p;
    w.pairs
        .iter()
        .filter(|&&(i, j)| x[i..i + p] != y[j..j + p])
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfhash::build_collision_free;

    #[test]
    fn short_y_gives_empty_matching() {
        let x = vec![1, 0, 1, 1, 0, 0, 1, 0];
        let (h, _) = build_collision_free(&x, 4).unwrap();
        let w = greedy_one_third(&[0, 1], &[0, 0], &[1, 0], &h);
        assert!(w.is_empty());
    }

    #[test]
    fn identical_strings_match_every_block() {
        let x: Vec<u8> = (0..64).map(|i| ((i * 7 + i / 3) % 2) as u8).collect();
        let (h, _) = build_collision_free(&x, 8).unwrap();
        let ev = h.evaluator();
        let blocks: Vec<usize> = (0..8).collect();
        let targets: Vec<u64> = blocks.iter().map(|b| ev.eval(&x[b * 8..b * 8 + 8]).unwrap()).collect();
        let w = greedy_one_third(&blocks, &targets, &x, &h);
        assert_eq!(w.len(), 8);
        assert_eq!(count_wrong_matches(&w, &x, &x), 0);
        assert!(is_maximal(&w, &blocks, &targets, &x, &h));
    }

    #[test]
    fn two_blocks_competing_for_one_window() {
        let x = vec![1, 1, 0, 1, 1, 0];
        let (h, _) = build_collision_free(&x, 3).unwrap();
        let target = h.evaluator().eval(&[1, 1, 0]).unwrap();
        let y = vec![0, 1, 1, 0, 0];
        let opt = brute_force_opt(&[0, 1], &[target, target], &y, &h).unwrap();
        assert_eq!(opt.len(), 1);
        let three = degree3_two_thirds(&[0, 1], &[target, target], &y, &h);
        assert_eq!(three.len(), 2);
        assert_eq!(three.max_degree(), 2);
    }
}
