mod common;

use blocksync::cfhash::{build_collision_free, HashDescriptor};
use blocksync::edit::{sample_trace, BlockEditOp};
use blocksync::matching::{
    brute_force_opt, count_wrong_matches, degree3_two_thirds, greedy_one_third, is_maximal,
    window_hashes, Matching,
};
use common::{random_bits, rng};
use rand::Rng;

struct Instance {
    x: Vec<u8>,
    y: Vec<u8>,
    blocks: Vec<usize>,
    targets: Vec<u64>,
    h: HashDescriptor,
}

/// Small random instance whose hash separates every window of x and y.
fn instance(r: &mut impl Rng, p: usize) -> Instance {
    loop {
        let nb = r.random_range(1..=10);
        let x = random_bits(r, nb * p);
        let ylen = r.random_range(p..=8 * p);
        let y = random_bits(r, ylen);
        let (h, _) = build_collision_free(&[&x[..], &y[..]].concat(), p).unwrap();
        let blocks: Vec<usize> = (0..nb).filter(|_| r.random_bool(0.85)).collect();
        let ev = h.evaluator();
        let targets: Vec<u64> = blocks.iter().map(|&b| ev.eval(&x[b * p..(b + 1) * p]).unwrap()).collect();
        let yh = window_hashes(&y, &h);
        let cands: usize = targets.iter().map(|t| yh.iter().filter(|&&v| v == *t).count()).sum();
        if cands <= 24 {
            return Instance { x, y, blocks, targets, h };
        }
    }
}

/// Independent exhaustive optimum: every block picks a candidate or none.
fn oracle_opt(inst: &Instance) -> usize {
    let p = inst.h.p;
    let yh = window_hashes(&inst.y, &inst.h);
    let cands: Vec<Vec<usize>> = inst
        .targets
        .iter()
        .map(|t| (0..yh.len()).filter(|&j| yh[j] == *t).collect())
        .collect();
    fn go(k: usize, cands: &[Vec<usize>], used: &mut Vec<usize>, p: usize) -> usize {
        if k == cands.len() {
            return used.len();
        }
        let mut best = go(k + 1, cands, used, p);
        for &j in &cands[k] {
            if used.iter().all(|&u| u + p <= j || j + p <= u) {
                used.push(j);
                best = best.max(go(k + 1, cands, used, p));
                used.pop();
            }
        }
        best
    }
    go(0, &cands, &mut Vec::new(), p)
}

fn check_pairs(w: &Matching, inst: &Instance) {
    let ev = inst.h.evaluator();
    let mut xs: Vec<usize> = w.pairs.iter().map(|&(i, _)| i).collect();
    xs.sort_unstable();
    xs.dedup();
    assert_eq!(xs.len(), w.len());
    for &(i, j) in &w.pairs {
        assert_eq!(i % w.p, 0);
        assert!(inst.blocks.contains(&(i / w.p)));
        assert_eq!(ev.eval(&inst.x[i..i + w.p]).unwrap(), ev.eval(&inst.y[j..j + w.p]).unwrap());
    }
    // Collision free on x and y: every pair is a correct match.
    assert_eq!(count_wrong_matches(w, &inst.x, &inst.y), 0);
}

#[test]
fn approximation_ratios_against_brute_force() {
    let mut r = rng(31);
    for _ in 0..300 {
        let inst = instance(&mut r, 4);
        let opt = brute_force_opt(&inst.blocks, &inst.targets, &inst.y, &inst.h).unwrap();
        assert_eq!(opt.len(), oracle_opt(&inst));
        assert!(opt.max_degree() <= 1);
        let g = greedy_one_third(&inst.blocks, &inst.targets, &inst.y, &inst.h);
        check_pairs(&g, &inst);
        assert!(g.max_degree() <= 1);
        assert!(is_maximal(&g, &inst.blocks, &inst.targets, &inst.y, &inst.h));
        assert!(3 * g.len() >= opt.len());
        let d3 = degree3_two_thirds(&inst.blocks, &inst.targets, &inst.y, &inst.h);
        check_pairs(&d3, &inst);
        assert!(d3.max_degree() <= 3);
        assert!(27 * d3.len() >= 19 * opt.len(), "{} vs {}", d3.len(), opt.len());
    }
}

#[test]
fn documented_cases() {
    let mut r = rng(32);
    let x = random_bits(&mut r, 64);
    let (h, _) = build_collision_free(&x, 8).unwrap();
    let ev = h.evaluator();
    let blocks: Vec<usize> = (0..8).collect();
    let targets: Vec<u64> = blocks.iter().map(|&b| ev.eval(&x[b * 8..b * 8 + 8]).unwrap()).collect();
    assert!(greedy_one_third(&blocks, &targets, &x[..7], &h).is_empty());
    assert_eq!(greedy_one_third(&blocks, &targets, &x, &h).len(), 8);
    assert!(degree3_two_thirds(&[], &[], &x, &h).is_empty());
    assert!(brute_force_opt(&[], &[], &x, &h).unwrap().is_empty());
    assert_eq!(brute_force_opt(&blocks, &targets, &x, &h).unwrap().len(), 8);
    // Block 0 occurs once in y: one match, later rounds add nothing.
    let y = [&x[..8], &[1 - x[8]; 4][..]].concat();
    let w = degree3_two_thirds(&[0], &targets[..1], &y, &h);
    assert_eq!(w.pairs, vec![(0, 0)]);
    // Two blocks that both want the only copy of one window.
    let w = brute_force_opt(&[0, 1], &[targets[0], targets[0]], &x[..8], &h).unwrap();
    assert_eq!(w.len(), 1);
    assert!(brute_force_opt(&(0..13).collect::<Vec<_>>(), &[targets[0]; 13], &x, &h).is_err());
}

#[test]
fn wrong_matches_after_block_edits() {
    let mut r = rng(33);
    let (n, p) = (2048, 32);
    for seed in 0..60 {
        let x = random_bits(&mut r, n);
        let (h, _) = build_collision_free(&x, p).unwrap();
        let ev = h.evaluator();
        let blocks: Vec<usize> = (0..n / p).collect();
        let targets: Vec<u64> = blocks.iter().map(|&b| ev.eval(&x[b * p..(b + 1) * p]).unwrap()).collect();
        let k = 1 + seed as usize % 4;
        let t = 64;
        let tr = sample_trace(seed, n, k, t);
        let y = tr.apply(&x).unwrap();
        let k2 = tr.ops.iter().filter(|o| matches!(o, BlockEditOp::Transpose { .. })).count();
        let k1 = tr.ops.len() - k2;
        let w = greedy_one_third(&blocks, &targets, &y, &h);
        let bound = 2 * k1 + 3 * k2 + t.div_ceil(p);
        assert!(count_wrong_matches(&w, &x, &y) <= bound);
    }
}
