//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if a criterion fails that is not listed in `KNOWN_FAILURES`.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use blocksync::bdistinct::{self, recover_rand, recover_rand_report, sketch_rand};
use blocksync::cfhash::{build_collision_free, eval_hash, verify_collision_free};
use blocksync::ecc::{self, CodecParams};
use blocksync::edit::{sample_trace, BlockEditOp, BlockEditTrace};
use blocksync::levels::{alice_sketch, bob_recover, make_schedule};
use blocksync::matching::{brute_force_opt, degree3_two_thirds, greedy_one_third, window_hashes};
use blocksync::oracles::{coloring_build, coloring_recover, coloring_sketch};
use blocksync::partition::{block_window, partition_symbols};
use blocksync::rs::{rs_decode, rs_parity, SymbolVector};
use blocksync::setrecon::{set_recon_recover, set_recon_sketch};
use blocksync::Variant;
use common::{random_bits, reference_parity, reference_set_evals, rng, NaiveField};
use rand::seq::SliceRandom;
use rand::Rng;

/// Criteria expected to fail, with the reason logged in the decisions file.
const KNOWN_FAILURES: &[u32] = &[3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn calibration(key: &str) -> usize {
    let text = include_str!("fixtures/calibration.txt");
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .find(|(k, _)| k.trim() == key)
        .and_then(|(_, v)| v.trim().parse().ok())
        .unwrap_or_else(|| panic!("missing calibration constant {key}"))
}

fn bits(r: &mut impl Rng, n: usize) -> Vec<u8> {
    random_bits(r, n)
}

fn c1_docx_round_trip() -> Outcome {
    let start = Instant::now();
    let n = 1 << 14;
    let mut r = rng(101);
    let mut cells = Vec::new();
    let mut pass = true;
    for (k, t) in [(1, 0), (4, 64), (8, 256)] {
        let mut ok = 0;
        for trial in 0..200u64 {
            let x = bits(&mut r, n);
            let y = sample_trace(trial * 31 + k as u64, n, k, t).apply(&x).unwrap();
            let sk = alice_sketch(&x, k, t).unwrap();
            if bob_recover(&y, &sk).is_ok_and(|got| got == x) {
                ok += 1;
            }
        }
        pass &= ok == 200;
        cells.push(format!("(k={k},t={t}) {ok}/200"));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 600.0;
    outcome(pass, format!("{}; {secs:.1}s", cells.join(", ")))
}

fn c2_prefix_move() -> Outcome {
    let n = 1 << 14;
    let x = bits(&mut rng(102), n);
    let cut = 2 * n / 5;
    let tr = BlockEditTrace::new(vec![BlockEditOp::Transpose { i: 1, l: cut, j: n }], 1, 0);
    let y = tr.apply(&x).unwrap();
    let lv = bob_recover(&y, &alice_sketch(&x, 1, 0).unwrap()).is_ok_and(|g| g == x);
    let bd = recover_rand(&y, &sketch_rand(&x, 1, 0).unwrap()).is_ok_and(|g| g == x);
    outcome(lv && bd, format!("moved {cut} bits; levels {lv}, bdist {bd}"))
}

fn c3_sketch_scaling() -> Outcome {
    let (k, t) = (4usize, 64usize);
    let mut ratios = Vec::new();
    for e in 12..=16 {
        let n = 1usize << e;
        let x = bits(&mut rng(103 + e as u64), n);
        let sk = alice_sketch(&x, k, t).unwrap();
        assert!(!sk.schedule.pass_through);
        let lg = e as f64;
        let base = k as f64 * lg + t as f64;
        let shape = base * (n as f64 / base).log2().powi(2);
        ratios.push((e, sk.bit_size(), sk.bit_size() as f64 / shape));
    }
    let hi = ratios.iter().map(|r| r.2).fold(f64::MIN, f64::max);
    let lo = ratios.iter().map(|r| r.2).fold(f64::MAX, f64::min);
    let detail = ratios
        .iter()
        .map(|(e, b, q)| format!("2^{e}:{b}b/{q:.1}"))
        .collect::<Vec<_>>()
        .join(" ");
    outcome(hi / lo < 2.0, format!("{detail}; spread {:.2}x", hi / lo))
}

fn c4_matching() -> Outcome {
    let mut r = rng(104);
    let p = 4;
    let (mut done, mut g_ok, mut d_ok, mut deg_ok) = (0, 0, 0, 0);
    while done < 500 {
        let nb = r.random_range(1..=12);
        let x = bits(&mut r, nb * p);
        let ylen = r.random_range(p..=10 * p);
        let y = bits(&mut r, ylen);
        let (h, _) = build_collision_free(&[&x[..], &y[..]].concat(), p).unwrap();
        let blocks: Vec<usize> = (0..nb).collect();
        let targets: Vec<u64> =
            blocks.iter().map(|&b| eval_hash(&h, &x[b * p..(b + 1) * p]).unwrap()).collect();
        let yh = window_hashes(&y, &h);
        let cands: usize = targets.iter().map(|t| yh.iter().filter(|&&v| v == *t).count()).sum();
        if cands > 24 {
            continue;
        }
        let opt = brute_force_opt(&blocks, &targets, &y, &h).unwrap().len();
        if opt > 12 {
            continue;
        }
        done += 1;
        let g = greedy_one_third(&blocks, &targets, &y, &h);
        let d = degree3_two_thirds(&blocks, &targets, &y, &h);
        g_ok += (g.len() >= opt.div_ceil(3)) as usize;
        d_ok += (27 * d.len() >= 19 * opt && d.len() >= (19 * opt).div_ceil(27)) as usize;
        deg_ok += (d.max_degree() <= 3 && g.max_degree() <= 1) as usize;
    }
    outcome(
        g_ok == 500 && d_ok == 500 && deg_ok == 500,
        format!("greedy {g_ok}/500, three-round {d_ok}/500, degree {deg_ok}/500"),
    )
}

fn c5_collision_free() -> Outcome {
    let n = 1 << 12;
    let mut r = rng(105);
    let mut details = Vec::new();
    let mut pass = true;
    for p in [64, 256] {
        let mut tried = Vec::new();
        let mut ok = 0;
        for _ in 0..100 {
            let x = bits(&mut r, n);
            if let Ok((h, c)) = build_collision_free(&x, p) {
                ok += verify_collision_free(&h, &x) as usize;
                tried.push(c);
            }
        }
        tried.sort_unstable();
        let median = tried.get(tried.len() / 2).copied().unwrap_or(u64::MAX);
        pass &= ok == 100 && median <= 4;
        details.push(format!("p={p}: {ok}/100 verified, median seeds {median}"));
    }
    outcome(pass, details.join("; "))
}

fn c6_partition_locality() -> Outcome {
    let (n, t) = (100_000, 64);
    let radius = block_window(t);
    let mut r = rng(106);
    let mut seen = std::collections::HashSet::new();
    let x: Vec<u64> = std::iter::from_fn(|| Some(r.random::<u64>()))
        .filter(|s| seen.insert(*s))
        .take(n)
        .collect();
    let base = partition_symbols(t, &x).unwrap();
    let mut bad = 0;
    let start = Instant::now();
    for run in 0..1000 {
        let pos = r.random_range(1..n - 1);
        let mut x2 = x.clone();
        let delta: isize = match run % 3 {
            0 => {
                x2[pos] = r.random();
                0
            }
            1 => {
                x2.insert(pos, r.random());
                1
            }
            _ => {
                x2.remove(pos);
                -1
            }
        };
        if x2.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let other = partition_symbols(t, &x2).unwrap();
        let b = base.block_of(pos);
        let lo = base.indices[b.saturating_sub(radius)];
        let hi = base.indices[(b + radius + 1).min(base.indices.len() - 1)];
        let before: Vec<isize> = base
            .indices
            .iter()
            .filter(|&&i| i < lo || i > hi)
            .map(|&i| if i > hi { i as isize + delta } else { i as isize })
            .collect();
        let hi2 = hi as isize + delta;
        let after: Vec<isize> = other
            .indices
            .iter()
            .map(|&i| i as isize)
            .filter(|&i| i < lo as isize || i > hi2)
            .collect();
        bad += (before != after) as usize;
    }
    outcome(
        bad == 0,
        format!("{bad}/1000 runs changed boundaries outside {radius} blocks; {:.1}s", start.elapsed().as_secs_f64()),
    )
}

fn c7_stage1_bounds() -> Outcome {
    let c1 = calibration("stage1_bad_blocks_c1");
    let c_d = calibration("stage1_set_difference_c_d");
    let n = 1 << 14;
    let mut r = rng(107);
    let (mut ok_bad, mut ok_diff, mut worst_bad, mut worst_diff) = (0, 0, 0.0f64, 0.0f64);
    let mut failed = 0;
    for trial in 0..100u64 {
        let k = r.random_range(1..=4);
        let t = r.random_range(0..=128);
        let x = bits(&mut r, n);
        let y = sample_trace(7000 + trial, n, k, t).apply(&x).unwrap();
        let sk = sketch_rand(&x, k, t).unwrap();
        let p = &sk.params;
        let rep = match recover_rand_report(&y, &sk, Some(&x)) {
            Ok((_, rep)) => rep,
            Err(_) => {
                failed += 1;
                continue;
            }
        };
        let bad_bound = c1 * (k + t.div_ceil(p.t_dprime));
        let diff_bound = c_d * (k * p.lllg + t.div_ceil(p.b * p.t_prime)).max(1);
        let bad = rep.bad_stage1_blocks.unwrap();
        ok_bad += (bad <= bad_bound) as usize;
        ok_diff += (rep.stage1.set_difference <= diff_bound) as usize;
        worst_bad = worst_bad.max(bad as f64 / (k + t.div_ceil(p.t_dprime)) as f64);
        worst_diff = worst_diff
            .max(rep.stage1.set_difference as f64 / (k * p.lllg + t.div_ceil(p.b * p.t_prime)).max(1) as f64);
    }
    outcome(
        failed == 0 && ok_bad == 100 && ok_diff == 100 && c_d == bdistinct::C_D,
        format!(
            "{failed} recoveries failed; bad blocks {ok_bad}/100 (c1={c1}, worst ratio {worst_bad:.2}); set difference {ok_diff}/100 (c_D={c_d}, worst ratio {worst_diff:.2})"
        ),
    )
}

fn c8_ecc() -> Outcome {
    let n = 1 << 13;
    let mut r = rng(108);
    let mut details = Vec::new();
    let mut pass = true;
    for variant in [Variant::Levels, Variant::BDistinct] {
        let mut ok = 0;
        for trial in 0..100u64 {
            let k = r.random_range(1..=4);
            let t = r.random_range(0..=128);
            let x = bits(&mut r, n);
            let c = ecc::encode(&x, k, t, variant).unwrap();
            let y = sample_trace(8000 + trial, c.bits.len(), k, t).apply(&c.bits).unwrap();
            ok += ecc::decode(&y, &c.params).is_ok_and(|g| g == x) as usize;
        }
        let red = |k, t| CodecParams::new(n, k, t, variant).unwrap().redundancy().unwrap();
        let mono_k = (1..4).all(|k| [0, 32, 128].iter().all(|&t| red(k, t) <= red(k + 1, t)));
        let ts = [0, 8, 16, 32, 64, 96, 128];
        let mono_t = (1..=4).all(|k| ts.windows(2).all(|w| red(k, w[0]) <= red(k, w[1])));
        pass &= ok == 100 && mono_k && mono_t;
        details.push(format!(
            "{}: {ok}/100, monotone in k {mono_k}, in t {mono_t}, redundancy (k=4,t=128) {}",
            variant.name(),
            red(4, 128)
        ));
    }
    outcome(pass, details.join("; "))
}

fn c9_syndrome_oracles() -> Outcome {
    let mut r = rng(109);
    let mut rs_bad = 0;
    for _ in 0..10_000 {
        let m = r.random_range(3..=12u32);
        let cap = (1usize << m) - 1;
        let d = r.random_range(1..=cap.min(16));
        let len = r.random_range(1..=(cap + 1 - d).min(24));
        let data: Vec<u128> = (0..len).map(|_| r.random_range(0..1u128 << m)).collect();
        let f = NaiveField::new(m);
        let parity = rs_parity(&SymbolVector::new(data.clone(), m).unwrap(), d).unwrap();
        let mut same = parity.symbols == reference_parity(&f, &data, d);
        let s = r.random_range(0..d);
        let e = r.random_range(0..=(d - 1 - s) / 2);
        let mut idx: Vec<usize> = (0..len + d - 1).collect();
        idx.shuffle(&mut r);
        let (mut rd, mut rp) = (data.clone(), parity.symbols.clone());
        for &i in &idx[..s + e] {
            let v = r.random_range(1..1u128 << m);
            if i < len {
                rd[i] ^= v;
            } else {
                rp[i - len] ^= v;
            }
        }
        let dec = rs_decode(&SymbolVector { symbols: rd, m }, &SymbolVector { symbols: rp, m }, d, &idx[..s]);
        same &= dec.is_ok_and(|dd| dd.data.symbols == data);
        rs_bad += (!same) as usize;
    }
    let mut set_bad = 0;
    for _ in 0..10_000 {
        let m = r.random_range(8..=48u32);
        let cap = r.random_range(1..=8usize);
        let size = r.random_range(0..24usize);
        let diff = r.random_range(0..=cap);
        let mut pool = BTreeSet::new();
        while pool.len() < size + diff {
            pool.insert(r.random_range(0..1u128 << m));
        }
        let mut pool: Vec<u128> = pool.into_iter().collect();
        pool.shuffle(&mut r);
        let common = size.saturating_sub(diff);
        let only_a = r.random_range(0..=diff);
        let v = pool[..common + only_a].to_vec();
        let mut vp = pool[..common].to_vec();
        vp.extend_from_slice(&pool[common + only_a..common + diff]);
        let sk = set_recon_sketch(&v, m, cap).unwrap();
        let mut want = v.clone();
        want.sort_unstable();
        let same = sk.evals == reference_set_evals(&v, m, 2 * cap)
            && set_recon_recover(&sk, &vp).is_ok_and(|mut g| {
                g.sort_unstable();
                g == want
            });
        set_bad += (!same) as usize;
    }
    outcome(
        rs_bad == 0 && set_bad == 0,
        format!("RS mismatches {rs_bad}/10000, set reconciliation mismatches {set_bad}/10000"),
    )
}

/// Every single-op trace (k = 1) of at most `t` bits, plus the empty one.
fn all_traces(n: usize, t: usize) -> Vec<BlockEditTrace> {
    let mut ops = Vec::new();
    for len in 1..=t {
        for pos in 1..=n + 1 {
            for v in 0..1usize << len {
                let payload = (0..len).map(|i| (v >> i & 1) as u8).collect();
                ops.push(BlockEditOp::Insert { pos, payload });
            }
        }
        for pos in 1..=n + 1 - len {
            ops.push(BlockEditOp::Delete { pos, len });
        }
    }
    for i in 1..=n {
        for l in 1..=n + 1 - i {
            for j in (0..i).chain(i + l..=n) {
                ops.push(BlockEditOp::Transpose { i, l, j });
            }
        }
    }
    let mut out = vec![BlockEditTrace::new(vec![], 1, t)];
    out.extend(ops.into_iter().map(|op| BlockEditTrace::new(vec![op], 1, t)));
    out
}

fn c10_coloring() -> Outcome {
    let (n, k, t) = (8, 1, 2);
    let table = coloring_build(n, k, t).unwrap();
    let traces = all_traces(n, t);
    let (mut total, mut ok) = (0usize, 0usize);
    for v in 0..1u32 << n {
        let x: Vec<u8> = (0..n).map(|i| (v >> i & 1) as u8).collect();
        let c = coloring_sketch(&x, &table).unwrap();
        for tr in &traces {
            let y = tr.apply(&x).unwrap();
            total += 1;
            ok += coloring_recover(&y, c, &table).is_ok_and(|g| g == x) as usize;
        }
    }
    let color_bits = table.sketch_bits();
    let x = vec![0u8; n];
    let main_bits = alice_sketch(&x, k, t).unwrap().bit_size();
    let sched = make_schedule(n, k, t);
    outcome(
        ok == total && table.is_proper() && color_bits <= main_bits,
        format!(
            "{ok}/{total} traces recovered ({} per string); {} colours = {color_bits} bits vs {main_bits} bits for the main sketch{}",
            traces.len(),
            table.colors,
            if sched.pass_through { " (pass-through at this size)" } else { "" }
        ),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "document-exchange round trip", c1_docx_round_trip),
        (2, "prefix move", c2_prefix_move),
        (3, "sketch scaling", c3_sketch_scaling),
        (4, "matching approximation", c4_matching),
        (5, "collision-free hash", c5_collision_free),
        (6, "partition locality", c6_partition_locality),
        (7, "stage I bounds", c7_stage1_bounds),
        (8, "ECC round trip", c8_ecc),
        (9, "RS and set reconciliation oracles", c9_syndrome_oracles),
        (10, "coloring cross-check", c10_coloring),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {verdict} {name}: {} [{:.1}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass && !KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
