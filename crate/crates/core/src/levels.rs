//! Deterministic multi-level sketch for block edit errors on arbitrary
//! inputs.
//!
//! The input is cut into blocks of size `b_1`, then each level halves the
//! block size down to `b_L`. Alice sends, per level, a collision-free hash
//! descriptor and Reed-Solomon parity over that level's block hashes; the
//! first level's hashes go verbatim. A last parity over the level-`L`
//! blocks themselves fills whatever Bob could not place.
//!
//! Bob keeps a partial copy `x̃`. At each level he decodes the true hash
//! vector from the hashes of the blocks he already has (blank blocks are
//! erasures), discards blocks whose hash disagrees, and matches the rest of
//! the blocks into `y` with the three-round greedy matching.

use crate::cfhash::{build_collision_free, hash_width, HashDescriptor, HASH_FIELD_BITS};
use crate::container::{Reader, SketchHeader, Writer, SKETCH_MAGIC};
use crate::matching::degree3_with_hashes;
use crate::prg::Seed;
use crate::rs::{rs_decode, rs_field_bits, rs_parity, SymbolVector};
use crate::{clog2, Error, Result, Variant};

/// Pass-through unless `k ≤ n / (ALPHA_INV · ⌈log₂ n⌉)`.
pub const ALPHA_INV: usize = 64;
/// Pass-through unless `t ≤ n / BETA_INV`.
pub const BETA_INV: usize = 8;
/// `b_1 ≤ n / (BLOCK_DIVISOR · k')`.
pub const BLOCK_DIVISOR: usize = 18;
/// Level-`i` hash parity distance `LEVEL_DISTANCE · k' · i`.
pub const LEVEL_DISTANCE: usize = 180;
/// Final parity distance `FINAL_DISTANCE · (k + ⌈t/b_L⌉) · L`.
pub const FINAL_DISTANCE: usize = 90;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSchedule {
    pub n_true: usize,
    /// Padded length, a multiple of `b[0]`.
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub big_l: usize,
    /// Block sizes, level 1 first.
    pub b: Vec<usize>,
    /// Block counts `n / b_i`.
    pub l: Vec<usize>,
    pub q: usize,
    /// Hash parity design distance per level (level 1 carries none).
    pub d: Vec<usize>,
    pub d_final: usize,
    pub pass_through: bool,
}

/// `k + ⌈t / ⌈log₂ n⌉⌉`.
pub fn effective_k(n: usize, k: usize, t: usize) -> usize {
    k + t.div_ceil(clog2(n))
}

/// Smallest power of two at least `2⌈log₂ n⌉`.
pub fn smallest_block(n: usize) -> usize {
    (2 * clog2(n)).next_power_of_two()
}

pub fn make_schedule(n: usize, k: usize, t: usize) -> LevelSchedule {
    let lg = clog2(n);
    let b_l = smallest_block(n);
    let pass_through =
        n < b_l || k * ALPHA_INV * lg > n || t * BETA_INV > n || n == 0;
    if pass_through {
        return LevelSchedule {
            n_true: n,
            n,
            k,
            t,
            big_l: 0,
            b: Vec::new(),
            l: Vec::new(),
            q: 0,
            d: Vec::new(),
            d_final: 1,
            pass_through: true,
        };
    }
    let kp = effective_k(n, k, t);
    let cap = if kp == 0 { n } else { n / (BLOCK_DIVISOR * kp) };
    let mut b1 = b_l;
    while b1 * 2 <= cap && b1 * 2 <= n {
        b1 *= 2;
    }
    let big_l = (b1 / b_l).trailing_zeros() as usize + 1;
    let n_padded = n.div_ceil(b1) * b1;
    let b: Vec<usize> = (0..big_l).map(|i| b1 >> i).collect();
    let l = b.iter().map(|&bi| n_padded / bi).collect();
    let d = (1..=big_l)
        .map(|i| if i == 1 { 1 } else { (LEVEL_DISTANCE * kp * i).max(1) })
        .collect();
    let d_final = (FINAL_DISTANCE * (k + t.div_ceil(b_l)) * big_l).max(1);
    LevelSchedule {
        n_true: n,
        n: n_padded,
        k,
        t,
        big_l,
        b,
        l,
        q: hash_width(n_padded),
        d,
        d_final,
        pass_through: false,
    }
}

impl LevelSchedule {
    /// RS symbol width for level `i` (0-based) hash parity.
    pub fn level_bits(&self, i: usize) -> u32 {
        rs_field_bits(self.q as u32, self.l[i], self.d[i])
    }

    pub fn final_bits(&self) -> u32 {
        let last = self.big_l - 1;
        rs_field_bits(self.b[last] as u32, self.l[last], self.d_final)
    }
}

/// Pad with a single 1 and then 0s up to a multiple of `block`, unless the
/// length already is one.
pub fn pad_input(x: &[u8], block: usize) -> Vec<u8> {
    let mut out = x.to_vec();
    if x.len() % block != 0 {
        out.push(1);
        out.resize(x.len().div_ceil(block) * block, 0);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sketch {
    pub schedule: LevelSchedule,
    pub hashes: Vec<HashDescriptor>,
    pub v1: Vec<u64>,
    /// Parity over level hashes; `z[0]` is empty.
    pub z: Vec<Vec<u128>>,
    pub z_final: Vec<u128>,
    /// The input itself, for pass-through sketches.
    pub raw: Option<Vec<u8>>,
}

fn block_symbol(block: &[u8]) -> u128 {
    crate::bits::to_uint(block)
}

pub fn alice_sketch(x: &[u8], k: usize, t: usize) -> Result<Sketch> {
    let schedule = make_schedule(x.len(), k, t);
    if schedule.pass_through {
        return Ok(Sketch {
            schedule,
            hashes: Vec::new(),
            v1: Vec::new(),
            z: Vec::new(),
            z_final: Vec::new(),
            raw: Some(x.to_vec()),
        });
    }
    let xp = pad_input(x, schedule.b[0]);
    let mut hashes = Vec::with_capacity(schedule.big_l);
    let mut z = Vec::with_capacity(schedule.big_l);
    let mut v1 = Vec::new();
    for i in 0..schedule.big_l {
        let bi = schedule.b[i];
        let (h, _) = build_collision_free(&xp, bi)?;
        let ev = h.evaluator();
        let v: Vec<u64> = xp.chunks(bi).map(|c| ev.eval(c)).collect::<Result<_>>()?;
        if i == 0 {
            v1 = v;
            z.push(Vec::new());
        } else {
            let m = schedule.level_bits(i);
            let data = SymbolVector::new(v.iter().map(|&s| s as u128).collect(), m)?;
            z.push(rs_parity(&data, schedule.d[i])?.symbols);
        }
        hashes.push(h);
    }
    let last = schedule.big_l - 1;
    let blocks: Vec<u128> = xp.chunks(schedule.b[last]).map(block_symbol).collect();
    let z_final = rs_parity(&SymbolVector::new(blocks, schedule.final_bits())?, schedule.d_final)?
        .symbols;
    Ok(Sketch { schedule, hashes, v1, z, z_final, raw: None })
}

impl Sketch {
    pub fn header(&self) -> SketchHeader {
        let s = &self.schedule;
        SketchHeader {
            n_true: s.n_true as u64,
            n_padded: s.n as u64,
            k: s.k as u32,
            t: s.t as u32,
            levels: s.big_l as u32,
            q: s.q as u32,
            variant: Variant::Levels,
            pass_through: s.pass_through,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(SKETCH_MAGIC);
        self.header().write(&mut w);
        if let Some(raw) = &self.raw {
            w.bits(raw);
            return w.finish();
        }
        let mut seeds = Vec::new();
        for h in &self.hashes {
            seeds.extend(h.seed.to_bits(HASH_FIELD_BITS));
        }
        w.bits(&seeds);
        let v1: Vec<u128> = self.v1.iter().map(|&v| v as u128).collect();
        w.symbols(&v1, self.schedule.q);
        for (i, zi) in self.z.iter().enumerate() {
            let width = if i == 0 { 1 } else { self.schedule.level_bits(i) as usize };
            w.symbols(zi, width);
        }
        w.symbols(&self.z_final, self.schedule.final_bits() as usize);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Sketch> {
        let mut r = Reader::new(bytes, SKETCH_MAGIC)?;
        let h = SketchHeader::read(&mut r)?;
        if h.variant != Variant::Levels {
            return Err(Error::Format("not a levels sketch".into()));
        }
        let schedule = make_schedule(h.n_true as usize, h.k as usize, h.t as usize);
        if schedule.pass_through != h.pass_through
            || schedule.n as u64 != h.n_padded
            || schedule.big_l as u32 != h.levels
            || schedule.q as u32 != h.q
        {
            return Err(Error::Format("sketch header disagrees with its schedule".into()));
        }
        if h.pass_through {
            let raw = r.bits()?;
            r.expect_done()?;
            if raw.len() != schedule.n_true {
                return Err(Error::Format("pass-through payload has the wrong length".into()));
            }
            return Ok(Sketch {
                schedule,
                hashes: Vec::new(),
                v1: Vec::new(),
                z: Vec::new(),
                z_final: Vec::new(),
                raw: Some(raw),
            });
        }
        let seeds = r.bits()?;
        let sw = 2 * HASH_FIELD_BITS as usize;
        if seeds.len() != sw * schedule.big_l {
            return Err(Error::Format("wrong seed section length".into()));
        }
        let mut hashes = Vec::with_capacity(schedule.big_l);
        for (i, chunk) in seeds.chunks(sw).enumerate() {
            let seed = Seed::from_bits(chunk, HASH_FIELD_BITS)?;
            hashes.push(HashDescriptor::new(seed, schedule.b[i], schedule.n));
        }
        let v1: Vec<u64> = r.symbols(schedule.q)?.into_iter().map(|v| v as u64).collect();
        if v1.len() != schedule.l[0] {
            return Err(Error::Format("wrong level-1 hash count".into()));
        }
        let mut z = Vec::with_capacity(schedule.big_l);
        for i in 0..schedule.big_l {
            let width = if i == 0 { 1 } else { schedule.level_bits(i) as usize };
            let zi = r.symbols(width)?;
            let want = if i == 0 { 0 } else { schedule.d[i] - 1 };
            if zi.len() != want {
                return Err(Error::Format(format!("wrong parity length at level {}", i + 1)));
            }
            z.push(zi);
        }
        let z_final = r.symbols(schedule.final_bits() as usize)?;
        if z_final.len() != schedule.d_final - 1 {
            return Err(Error::Format("wrong final parity length".into()));
        }
        r.expect_done()?;
        Ok(Sketch { schedule, hashes, v1, z, z_final, raw: None })
    }

    /// Serialized size in bits.
    pub fn bit_size(&self) -> usize {
        8 * self.to_bytes().len()
    }

    /// `(section name, bits)` for the payload sections.
    pub fn section_bits(&self) -> Vec<(String, usize)> {
        let s = &self.schedule;
        if let Some(raw) = &self.raw {
            return vec![("raw".into(), raw.len())];
        }
        let mut out = vec![
            ("seeds".into(), self.hashes.len() * 2 * HASH_FIELD_BITS as usize),
            ("v1".into(), self.v1.len() * s.q),
        ];
        for i in 1..s.big_l {
            out.push((format!("z{}", i + 1), self.z[i].len() * s.level_bits(i) as usize));
        }
        out.push(("z_final".into(), self.z_final.len() * s.final_bits() as usize));
        out
    }
}

fn section_bytes(bits: usize) -> usize {
    8 + bits.div_ceil(8)
}

/// Serialized sketch length for an `n`-bit input, without building it.
pub fn sketch_byte_len(n: usize, k: usize, t: usize) -> usize {
    let s = make_schedule(n, k, t);
    let head = 4 + 34;
    if s.pass_through {
        return head + section_bytes(n);
    }
    let mut total = head
        + section_bytes(s.big_l * 2 * HASH_FIELD_BITS as usize)
        + section_bytes(s.l[0] * s.q)
        + section_bytes(0);
    for i in 1..s.big_l {
        total += section_bytes((s.d[i] - 1) * s.level_bits(i) as usize);
    }
    total + section_bytes((s.d_final - 1) * s.final_bits() as usize)
}

/// Per-level counters from one recovery.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LevelStats {
    pub block_size: usize,
    pub blocks: usize,
    /// Hash symbols the level's decoder changed or filled.
    pub hash_errata: usize,
    /// Blocks that were blank or failed their hash check before matching.
    pub to_match: usize,
    pub matched: usize,
    /// Blocks still blank after matching.
    pub unrecovered: usize,
    /// Filled blocks whose content is wrong; only with a reference input.
    pub wrong: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecoveryReport {
    pub levels: Vec<LevelStats>,
    pub final_errors: usize,
    pub final_erasures: usize,
}

pub fn bob_recover(y: &[u8], sketch: &Sketch) -> Result<Vec<u8>> {
    Ok(bob_recover_report(y, sketch, None)?.0)
}

const BLANK: u8 = 2;

/// Recovery with per-level counters. With `reference` (Alice's input) the
/// wrong-fill counts are filled in.
pub fn bob_recover_report(
    y: &[u8],
    sketch: &Sketch,
    reference: Option<&[u8]>,
) -> Result<(Vec<u8>, RecoveryReport)> {
    if let Some(raw) = &sketch.raw {
        return Ok((raw.clone(), RecoveryReport::default()));
    }
    let s = &sketch.schedule;
    let reference = reference.map(|x| pad_input(x, s.b[0]));
    let mut xt = vec![BLANK; s.n];
    let mut report = RecoveryReport::default();
    for i in 0..s.big_l {
        let bi = s.b[i];
        let li = s.l[i];
        let h = &sketch.hashes[i];
        let ev = h.evaluator();
        let filled: Vec<bool> = xt.chunks(bi).map(|c| !c.contains(&BLANK)).collect();
        let mut own = vec![0u64; li];
        for j in 0..li {
            if filled[j] {
                own[j] = ev.eval(&xt[j * bi..(j + 1) * bi])?;
            }
        }
        let mut stats = LevelStats { block_size: bi, blocks: li, ..Default::default() };
        let v: Vec<u64> = if i == 0 {
            sketch.v1.clone()
        } else {
            let m = s.level_bits(i);
            let erasures: Vec<usize> = (0..li).filter(|&j| !filled[j]).collect();
            let recv = SymbolVector { symbols: own.iter().map(|&v| v as u128).collect(), m };
            let par = SymbolVector { symbols: sketch.z[i].clone(), m };
            let dec = rs_decode(&recv, &par, s.d[i], &erasures).map_err(|e| {
                Error::DecodeFailed(format!("level {} hash parity: {e}", i + 1))
            })?;
            stats.hash_errata = dec.errors + dec.erasures;
            let limit = if s.q >= 64 { u128::MAX } else { 1u128 << s.q };
            if dec.data.symbols.iter().any(|&v| v >= limit) {
                return Err(Error::DecodeFailed(format!(
                    "level {} hash parity decoded out-of-range values",
                    i + 1
                )));
            }
            dec.data.symbols.iter().map(|&v| v as u64).collect()
        };
        let todo: Vec<usize> = (0..li).filter(|&j| !filled[j] || own[j] != v[j]).collect();
        for &j in &todo {
            xt[j * bi..(j + 1) * bi].fill(BLANK);
        }
        stats.to_match = todo.len();
        let targets: Vec<u64> = todo.iter().map(|&j| v[j]).collect();
        let w = degree3_with_hashes(bi, &todo, &targets, &ev.windows(y));
        stats.matched = w.len();
        for &(xs, ys) in &w.pairs {
            xt[xs..xs + bi].copy_from_slice(&y[ys..ys + bi]);
        }
        stats.unrecovered = xt.chunks(bi).filter(|c| c.contains(&BLANK)).count();
        if let Some(x) = &reference {
            stats.wrong = Some(
                xt.chunks(bi)
                    .zip(x.chunks(bi))
                    .filter(|(a, b)| !a.contains(&BLANK) && a != b)
                    .count(),
            );
        }
        report.levels.push(stats);
    }

    let last = s.big_l - 1;
    let bl = s.b[last];
    let m = s.final_bits();
    let mut symbols = Vec::with_capacity(s.l[last]);
    let mut erasures = Vec::new();
    for (j, c) in xt.chunks(bl).enumerate() {
        if c.contains(&BLANK) {
            erasures.push(j);
            symbols.push(0);
        } else {
            symbols.push(block_symbol(c));
        }
    }
    let dec = rs_decode(
        &SymbolVector { symbols, m },
        &SymbolVector { symbols: sketch.z_final.clone(), m },
        s.d_final,
        &erasures,
    )
    .map_err(|e| Error::DecodeFailed(format!("final block parity: {e}")))?;
    report.final_errors = dec.errors;
    report.final_erasures = dec.erasures;
    let mut out = Vec::with_capacity(s.n);
    for &sym in &dec.data.symbols {
        if bl < 128 && sym >> bl != 0 {
            return Err(Error::DecodeFailed("final block parity decoded an oversized block".into()));
        }
        crate::bits::push_uint(&mut out, sym, bl);
    }
    // The level-1 hashes are exact; a miscorrection shows up here.
    let ev = sketch.hashes[0].evaluator();
    for (j, c) in out.chunks(s.b[0]).enumerate() {
        if ev.eval(c)? != sketch.v1[j] {
            return Err(Error::DecodeFailed(format!(
                "recovered block {j} fails its level-1 hash"
            )));
        }
    }
    out.truncate(s.n_true);
    Ok((out, report))
}
