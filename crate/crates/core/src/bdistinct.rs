//! Two-stage sketch for inputs whose length-`B` windows are all distinct.
//!
//! Stage I parses the string of overlapping `B`-bit windows twice (with
//! thresholds `T` and `T'`) into blocks and describes each block by its
//! length, its `B`-prefix and the next block's prefix. The set of these
//! records is sent through set reconciliation, so Bob can rebuild the block
//! layout of `x` and fill every block whose prefix and length pick out a
//! unique block of `y`.
//!
//! Stage II runs hashing levels from block size `b_{i*} ≥ T''` down to
//! `b_L`, where the hash of a block is simply its first `B` bits. Bob
//! decodes each level's hash vector from his partial copy, then places
//! every block at the first free position of `y` carrying that prefix.
//! A final parity over the smallest blocks repairs what is left.
//!
//! Block boundaries found on the window string map to the same bit
//! offsets; the final `B - 1` bits join the last block. Blocks at each
//! stage II level are aligned at multiples of `b_i`, and the last one is
//! truncated when `b_i` does not divide `n`.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::container::{Reader, SketchHeader, Writer, SKETCH_MAGIC};
use crate::levels::smallest_block;
use crate::partition::partition_symbols;
use crate::rs::{rs_decode, rs_field_bits, rs_parity, SymbolVector};
use crate::setrecon::{set_difference, set_recon_sketch, SetSketch, MAX_ELEMENT_BITS};
use crate::{bits, clog2, Error, Result, Variant};

/// Reconciliation capacity multiplier `c_D`.
pub const C_D: usize = 12;
/// Stage II per-level parity multiplier `c*`.
pub const C_STAR: usize = 20;
/// Final parity multiplier.
pub const C_FINAL: usize = 20;

const BLANK: u8 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageParams {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    /// Prefix length, also the first partition threshold `T`.
    pub b: usize,
    /// `T' = ⌈log₂ T⌉`.
    pub t_prime: usize,
    /// `T'' = T T' ⌈log₂log₂ n⌉² ⌈log₂log₂log₂ n⌉`.
    pub t_dprime: usize,
    /// `⌈log₂log₂log₂ n⌉`.
    pub lllg: usize,
    /// Reconciliation capacity `D`.
    pub capacity: usize,
    /// Bits for a block length in a record.
    pub len_bits: u32,
    /// Record width `len_bits + 2B`.
    pub m_v: u32,
    /// Stage II block sizes, largest first.
    pub sizes: Vec<usize>,
    /// Stage II parity distances per level.
    pub d: Vec<usize>,
    pub d_final: usize,
}

pub fn stage_params(n: usize, k: usize, t: usize) -> Result<StageParams> {
    let lg = clog2(n);
    let b = 3 * lg;
    if b > 63 {
        return Err(Error::TooLarge(format!("n = {n} gives B = {b} > 63")));
    }
    if n < 2 * b {
        return Err(Error::Precondition(format!("n = {n} is shorter than 2B = {}", 2 * b)));
    }
    let t_prime = clog2(b);
    let llg = clog2(lg);
    let lllg = clog2(llg);
    let t_dprime = b * t_prime * llg * llg * lllg;
    let capacity = C_D * (k * lllg + t.div_ceil(b * t_prime)).max(1);
    let len_bits = clog2(n + 1) as u32;
    let m_v = len_bits + 2 * b as u32;
    if m_v > MAX_ELEMENT_BITS {
        return Err(Error::TooLarge(format!("record width {m_v} exceeds {MAX_ELEMENT_BITS}")));
    }
    let b_l = smallest_block(n);
    let mut top = b_l;
    while top < t_dprime {
        top *= 2;
    }
    let mut sizes = Vec::new();
    let mut s = top;
    while s >= b_l {
        sizes.push(s);
        s /= 2;
    }
    let d = sizes.iter().map(|&bi| C_STAR * (k + t.div_ceil(bi)).max(1)).collect();
    let d_final = C_FINAL * (k + t.div_ceil(b_l)).max(1);
    Ok(StageParams {
        n,
        k,
        t,
        b,
        t_prime,
        t_dprime,
        lllg,
        capacity,
        len_bits,
        m_v,
        sizes,
        d,
        d_final,
    })
}

impl StageParams {
    fn block_count(&self, size: usize) -> usize {
        self.n.div_ceil(size)
    }

    fn block_len(&self, size: usize, j: usize) -> usize {
        size.min(self.n - j * size)
    }

    fn level_bits(&self, i: usize) -> u32 {
        let bi = self.sizes[i];
        rs_field_bits(bi.min(self.b) as u32, self.block_count(bi), self.d[i])
    }

    fn final_bits(&self) -> u32 {
        let bl = *self.sizes.last().unwrap();
        rs_field_bits(bl as u32, self.block_count(bl), self.d_final)
    }
}

/// Integer value of every length-`w` window (`w ≤ 64`), by start offset.
pub fn window_values(x: &[u8], w: usize) -> Vec<u64> {
    assert!(w <= 64 && w > 0);
    if x.len() < w {
        return Vec::new();
    }
    let mask = if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
    let mut out = Vec::with_capacity(x.len() - w + 1);
    let mut v = 0u64;
    for (i, &bit) in x.iter().enumerate() {
        v = ((v << 1) | bit as u64) & mask;
        if i + 1 >= w {
            out.push(v);
        }
    }
    out
}

/// True iff all length-`b` windows of `x` are pairwise distinct.
pub fn is_b_distinct(x: &[u8], b: usize) -> bool {
    if b == 0 || b > x.len() {
        return b != 0;
    }
    if b <= 64 {
        let mut v = window_values(x, b);
        v.sort_unstable();
        return v.windows(2).all(|w| w[0] != w[1]);
    }
    let mut starts: Vec<usize> = (0..=x.len() - b).collect();
    starts.sort_unstable_by(|&i, &j| x[i..i + b].cmp(&x[j..j + b]));
    starts.windows(2).all(|w| x[w[0]..w[0] + b] != x[w[1]..w[1] + b])
}

/// Block starts (plus the end) of `a`, partitioned piecewise between
/// equal adjacent symbols. Bob's `y` can repeat a window next to an edit;
/// cutting there keeps the damage local. Adjacent-distinct input gives the
/// plain partition.
fn partition_pieces(t: usize, a: &[u64]) -> Result<Vec<usize>> {
    let mut out = vec![0];
    let mut lo = 0;
    for hi in (1..=a.len()).filter(|&i| i == a.len() || a[i] == a[i - 1]) {
        let part = partition_symbols(t, &a[lo..hi])?;
        out.extend(part.indices[1..].iter().map(|&i| lo + i));
        lo = hi;
    }
    Ok(out)
}

/// Bit blocks `(start, end)` from the composed two-threshold partition.
pub fn stage1_blocks(x: &[u8], p: &StageParams) -> Result<Vec<(usize, usize)>> {
    if x.len() < p.b {
        return Ok(if x.is_empty() { Vec::new() } else { vec![(0, x.len())] });
    }
    let xbar = window_values(x, p.b);
    let first = partition_pieces(p.b, &xbar)?;
    let starts: Vec<u64> = first[..first.len() - 1].iter().map(|&i| xbar[i]).collect();
    let second = partition_pieces(p.t_prime, &starts)?;
    let mut cuts: Vec<usize> = second.iter().map(|&j| first[j]).collect();
    *cuts.last_mut().unwrap() = x.len();
    Ok(cuts.windows(2).map(|w| (w[0], w[1])).collect())
}

fn prefix(x: &[u8], start: usize, b: usize) -> u64 {
    bits::to_uint(&x[start..start + b]) as u64
}

/// Records `(len, prefix, next prefix)` packed as `len | prefix | next`.
fn records(x: &[u8], blocks: &[(usize, usize)], p: &StageParams) -> Vec<u128> {
    let b = p.b;
    let mut out = Vec::new();
    for w in blocks.windows(2) {
        let ((s0, e0), (s1, e1)) = (w[0], w[1]);
        if e0 - s0 < b || e1 - s1 < b {
            continue;
        }
        let len = (e0 - s0) as u128;
        if len >> p.len_bits != 0 {
            continue;
        }
        out.push(
            (len << (2 * b)) | ((prefix(x, s0, b) as u128) << b) | prefix(x, s1, b) as u128,
        );
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub fn stage1_set(x: &[u8], p: &StageParams) -> Result<Vec<u128>> {
    Ok(records(x, &stage1_blocks(x, p)?, p))
}

pub fn stage1_sketch(x: &[u8], p: &StageParams) -> Result<SetSketch> {
    if !is_b_distinct(x, p.b) {
        return Err(Error::Precondition(format!("input is not {}-distinct", p.b)));
    }
    set_recon_sketch(&stage1_set(x, p)?, p.m_v, p.capacity)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stage1Report {
    /// |V Δ V'|.
    pub set_difference: usize,
    /// Blocks of the recovered layout.
    pub blocks: usize,
    /// Layout blocks filled from a unique match in y.
    pub filled: usize,
}

/// Partial copy of `x` (bits 0/1, blanks as 2) after stage I.
pub fn stage1_recover(y: &[u8], sketch: &SetSketch, p: &StageParams) -> Result<Vec<u8>> {
    Ok(stage1_recover_report(y, sketch, p)?.0)
}

pub fn stage1_recover_report(
    y: &[u8],
    sketch: &SetSketch,
    p: &StageParams,
) -> Result<(Vec<u8>, Stage1Report)> {
    let b = p.b;
    let y_blocks = stage1_blocks(y, p)
        .map_err(|e| Error::ReconcileFailed(format!("stage I partition of y: {e}")))?;
    let v_prime = records(y, &y_blocks, p);
    let (added, removed) = set_difference(sketch, &v_prime)?;
    let mut report = Stage1Report {
        set_difference: added.len() + removed.len(),
        ..Default::default()
    };
    let mut v: Vec<u128> = v_prime
        .iter()
        .copied()
        .filter(|r| removed.binary_search(r).is_err())
        .chain(added)
        .collect();
    v.sort_unstable();

    let mask = (1u128 << b) - 1;
    let field = |r: u128| ((r >> (2 * b)) as usize, ((r >> b) & mask) as u64, (r & mask) as u64);
    let mut xt = vec![BLANK; p.n];
    if v.is_empty() {
        return Ok((xt, report));
    }
    let mut by_prefix: HashMap<u64, (usize, u64)> = HashMap::with_capacity(v.len());
    for &r in &v {
        let (len, pre, next) = field(r);
        if by_prefix.insert(pre, (len, next)).is_some() {
            return Err(Error::Ambiguous(format!("two records share prefix {pre:#x}")));
        }
    }
    let nexts: HashSet<u64> = v.iter().map(|&r| field(r).2).collect();
    let heads: Vec<u64> = by_prefix.keys().copied().filter(|k| !nexts.contains(k)).collect();
    if heads.len() != 1 {
        return Err(Error::Ambiguous(format!("{} candidate chain starts", heads.len())));
    }
    let mut layout: Vec<(usize, usize, u64)> = Vec::with_capacity(v.len() + 1);
    let mut pos = 0usize;
    let mut cur = heads[0];
    while let Some(&(len, next)) = by_prefix.get(&cur) {
        if layout.len() > v.len() {
            return Err(Error::Ambiguous("record chain has a cycle".into()));
        }
        layout.push((pos, len, cur));
        pos += len;
        cur = next;
    }
    if layout.len() != v.len() || pos + b > p.n {
        return Err(Error::ReconcileFailed("record chain does not cover the input".into()));
    }
    layout.push((pos, p.n - pos, cur));
    report.blocks = layout.len();

    let mut y_index: HashMap<(u64, usize), Option<usize>> = HashMap::new();
    for &(s, e) in &y_blocks {
        if e - s >= b {
            y_index
                .entry((prefix(y, s, b), e - s))
                .and_modify(|slot| *slot = None)
                .or_insert(Some(s));
        }
    }
    for &(start, len, pre) in &layout {
        let pre_bits = bits::uint_bits(pre as u128, b);
        xt[start..start + b].copy_from_slice(&pre_bits);
        if let Some(Some(ys)) = y_index.get(&(pre, len)) {
            xt[start..start + len].copy_from_slice(&y[*ys..*ys + len]);
            report.filled += 1;
        }
    }
    Ok((xt, report))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage2Sketch {
    pub z: Vec<Vec<u128>>,
    pub z_final: Vec<u128>,
}

fn level_hashes(x: &[u8], size: usize, p: &StageParams) -> Vec<u128> {
    (0..p.block_count(size))
        .map(|j| {
            let len = p.block_len(size, j);
            bits::to_uint(&x[j * size..j * size + len.min(p.b)])
        })
        .collect()
}

pub fn stage2_sketch(x: &[u8], p: &StageParams) -> Result<Stage2Sketch> {
    let mut z = Vec::with_capacity(p.sizes.len());
    for (i, &size) in p.sizes.iter().enumerate() {
        let data = SymbolVector::new(level_hashes(x, size, p), p.level_bits(i))?;
        z.push(rs_parity(&data, p.d[i])?.symbols);
    }
    let bl = *p.sizes.last().unwrap();
    let blocks = (0..p.block_count(bl))
        .map(|j| bits::to_uint(&x[j * bl..j * bl + p.block_len(bl, j)]))
        .collect();
    let z_final = rs_parity(&SymbolVector::new(blocks, p.final_bits())?, p.d_final)?.symbols;
    Ok(Stage2Sketch { z, z_final })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stage2Level {
    pub block_size: usize,
    pub blocks: usize,
    pub hash_errata: usize,
    pub matched: usize,
    /// Blocks blank or wrong after the level; only with a reference input.
    pub bad: Option<usize>,
}

pub fn stage2_recover(xt: &[u8], y: &[u8], s2: &Stage2Sketch, p: &StageParams) -> Result<Vec<u8>> {
    Ok(stage2_recover_report(xt, y, s2, p, None)?.0)
}

pub fn stage2_recover_report(
    xt: &[u8],
    y: &[u8],
    s2: &Stage2Sketch,
    p: &StageParams,
    reference: Option<&[u8]>,
) -> Result<(Vec<u8>, Vec<Stage2Level>)> {
    if xt.len() != p.n {
        return Err(Error::Precondition("partial copy has the wrong length".into()));
    }
    let mut xt = xt.to_vec();
    let mut report = Vec::with_capacity(p.sizes.len());
    for (i, &size) in p.sizes.iter().enumerate() {
        let count = p.block_count(size);
        let w = size.min(p.b);
        let m = p.level_bits(i);
        let mut own = vec![0u128; count];
        let mut erasures = Vec::new();
        for (j, slot) in own.iter_mut().enumerate() {
            let len = p.block_len(size, j).min(w);
            let head = &xt[j * size..j * size + len];
            if head.contains(&BLANK) {
                erasures.push(j);
            } else {
                *slot = bits::to_uint(head);
            }
        }
        let dec = rs_decode(
            &SymbolVector { symbols: own.clone(), m },
            &SymbolVector { symbols: s2.z[i].clone(), m },
            p.d[i],
            &erasures,
        )
        .map_err(|e| Error::DecodeFailed(format!("stage II level {} parity: {e}", i + 1)))?;
        let v = dec.data.symbols;
        for (j, &val) in v.iter().enumerate() {
            let len = p.block_len(size, j).min(w);
            if val >> len != 0 {
                return Err(Error::DecodeFailed(format!(
                    "stage II level {} decoded an oversized prefix",
                    i + 1
                )));
            }
        }
        let mut stats = Stage2Level {
            block_size: size,
            blocks: count,
            hash_errata: dec.errors + dec.erasures,
            ..Default::default()
        };
        for j in 0..count {
            let start = j * size;
            let len = p.block_len(size, j);
            if erasures.binary_search(&j).is_err() && own[j] != v[j] {
                xt[start..start + len].fill(BLANK);
            }
        }

        // First fit: each block takes the leftmost unused window of y whose
        // first bits equal its decoded prefix.
        let full_vals = window_values(y, w);
        let mut positions: HashMap<u64, Vec<usize>> = HashMap::new();
        let wanted: HashSet<u64> = v.iter().map(|&x| x as u64).collect();
        for (pos, &val) in full_vals.iter().enumerate() {
            if wanted.contains(&val) {
                positions.entry(val).or_default().push(pos);
            }
        }
        let mut cursor: HashMap<u64, usize> = HashMap::new();
        let mut used: BTreeMap<usize, usize> = BTreeMap::new();
        let free = |used: &BTreeMap<usize, usize>, s: usize, e: usize| {
            used.range(..e).next_back().is_none_or(|(_, &end)| end <= s)
        };
        for (j, &val) in v.iter().enumerate() {
            let start = j * size;
            let len = p.block_len(size, j);
            let found = if len < w {
                let vals = window_values(y, len);
                (0..vals.len())
                    .find(|&pos| vals[pos] as u128 == val && free(&used, pos, pos + len))
            } else {
                let list = positions.get(&(val as u64)).map(Vec::as_slice).unwrap_or(&[]);
                let mut scratch = 0;
                let c = if len == size {
                    cursor.entry(val as u64).or_insert(0)
                } else {
                    &mut scratch
                };
                let mut hit = None;
                while *c < list.len() {
                    let pos = list[*c];
                    if pos + len <= y.len() && free(&used, pos, pos + len) {
                        hit = Some(pos);
                        *c += 1;
                        break;
                    }
                    *c += 1;
                }
                hit
            };
            if let Some(pos) = found {
                used.insert(pos, pos + len);
                xt[start..start + len].copy_from_slice(&y[pos..pos + len]);
                stats.matched += 1;
            }
        }
        if let Some(x) = reference {
            stats.bad = Some(
                (0..count)
                    .filter(|&j| {
                        let r = j * size..j * size + p.block_len(size, j);
                        xt[r.clone()] != x[r]
                    })
                    .count(),
            );
        }
        report.push(stats);
    }

    let bl = *p.sizes.last().unwrap();
    let count = p.block_count(bl);
    let m = p.final_bits();
    let mut symbols = Vec::with_capacity(count);
    let mut erasures = Vec::new();
    for j in 0..count {
        let blk = &xt[j * bl..j * bl + p.block_len(bl, j)];
        if blk.contains(&BLANK) {
            erasures.push(j);
            symbols.push(0);
        } else {
            symbols.push(bits::to_uint(blk));
        }
    }
    let dec = rs_decode(
        &SymbolVector { symbols, m },
        &SymbolVector { symbols: s2.z_final.clone(), m },
        p.d_final,
        &erasures,
    )
    .map_err(|e| Error::DecodeFailed(format!("stage II final parity: {e}")))?;
    let mut out = Vec::with_capacity(p.n);
    for (j, &sym) in dec.data.symbols.iter().enumerate() {
        let len = p.block_len(bl, j);
        if sym >> len != 0 {
            return Err(Error::DecodeFailed("stage II final parity decoded an oversized block".into()));
        }
        bits::push_uint(&mut out, sym, len);
    }
    Ok((out, report))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BdSketch {
    pub params: StageParams,
    pub set: SetSketch,
    pub stage2: Stage2Sketch,
}

pub fn sketch_rand(x: &[u8], k: usize, t: usize) -> Result<BdSketch> {
    let params = stage_params(x.len(), k, t)?;
    let set = stage1_sketch(x, &params)?;
    let stage2 = stage2_sketch(x, &params)?;
    Ok(BdSketch { params, set, stage2 })
}

pub fn recover_rand(y: &[u8], sketch: &BdSketch) -> Result<Vec<u8>> {
    let xt = stage1_recover(y, &sketch.set, &sketch.params)?;
    stage2_recover(&xt, y, &sketch.stage2, &sketch.params)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BdReport {
    pub stage1: Stage1Report,
    /// T''-blocks of the stage I copy that are blank or wrong somewhere.
    pub bad_stage1_blocks: Option<usize>,
    pub stage2: Vec<Stage2Level>,
}

pub fn recover_rand_report(
    y: &[u8],
    sketch: &BdSketch,
    reference: Option<&[u8]>,
) -> Result<(Vec<u8>, BdReport)> {
    let p = &sketch.params;
    let (xt, s1) = stage1_recover_report(y, &sketch.set, p)?;
    let bad = reference.map(|x| {
        xt.chunks(p.t_dprime).zip(x.chunks(p.t_dprime)).filter(|(a, b)| a != b).count()
    });
    let (out, s2) = stage2_recover_report(&xt, y, &sketch.stage2, p, reference)?;
    Ok((out, BdReport { stage1: s1, bad_stage1_blocks: bad, stage2: s2 }))
}

impl BdSketch {
    pub fn header(&self) -> SketchHeader {
        let p = &self.params;
        SketchHeader {
            n_true: p.n as u64,
            n_padded: p.n as u64,
            k: p.k as u32,
            t: p.t as u32,
            levels: p.sizes.len() as u32,
            q: p.b as u32,
            variant: Variant::BDistinct,
            pass_through: false,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let p = &self.params;
        let mut w = Writer::new(SKETCH_MAGIC);
        self.header().write(&mut w);
        w.u32(p.capacity as u32);
        w.u32(p.t_dprime as u32);
        w.u64(self.set.count);
        w.symbols(&self.set.evals, self.set.field_bits() as usize);
        for (i, zi) in self.stage2.z.iter().enumerate() {
            w.symbols(zi, p.level_bits(i) as usize);
        }
        w.symbols(&self.stage2.z_final, p.final_bits() as usize);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<BdSketch> {
        let mut r = Reader::new(bytes, SKETCH_MAGIC)?;
        let h = SketchHeader::read(&mut r)?;
        if h.variant != Variant::BDistinct || h.pass_through {
            return Err(Error::Format("not a B-distinct sketch".into()));
        }
        let p = stage_params(h.n_true as usize, h.k as usize, h.t as usize)?;
        if h.levels as usize != p.sizes.len()
            || h.q as usize != p.b
            || r.usize32()? != p.capacity
            || r.usize32()? != p.t_dprime
        {
            return Err(Error::Format("sketch header disagrees with its parameters".into()));
        }
        let count = r.u64()?;
        let evals = r.symbols(p.m_v as usize + 1)?;
        if evals.len() != 2 * p.capacity {
            return Err(Error::Format("wrong set sketch length".into()));
        }
        let set = SetSketch { evals, capacity: p.capacity, m: p.m_v, count };
        let mut z = Vec::with_capacity(p.sizes.len());
        for i in 0..p.sizes.len() {
            let zi = r.symbols(p.level_bits(i) as usize)?;
            if zi.len() != p.d[i] - 1 {
                return Err(Error::Format(format!("wrong parity length at level {}", i + 1)));
            }
            z.push(zi);
        }
        let z_final = r.symbols(p.final_bits() as usize)?;
        if z_final.len() != p.d_final - 1 {
            return Err(Error::Format("wrong final parity length".into()));
        }
        r.expect_done()?;
        Ok(BdSketch { params: p, set, stage2: Stage2Sketch { z, z_final } })
    }

    pub fn bit_size(&self) -> usize {
        8 * self.to_bytes().len()
    }

    pub fn section_bits(&self) -> Vec<(String, usize)> {
        let p = &self.params;
        let mut out = vec![("set".into(), self.set.bit_size())];
        for (i, zi) in self.stage2.z.iter().enumerate() {
            out.push((format!("z{}", i + 1), zi.len() * p.level_bits(i) as usize));
        }
        out.push(("z_final".into(), self.stage2.z_final.len() * p.final_bits() as usize));
        out
    }
}

/// Serialized sketch length for an `n`-bit input, without building it.
pub fn sketch_byte_len(n: usize, k: usize, t: usize) -> Result<usize> {
    let p = stage_params(n, k, t)?;
    let sec = |bits: usize| 8 + bits.div_ceil(8);
    let mut total = 4 + 34 + 4 + 4 + 8 + sec(2 * p.capacity * (p.m_v as usize + 1));
    for i in 0..p.sizes.len() {
        total += sec((p.d[i] - 1) * p.level_bits(i) as usize);
    }
    Ok(total + sec((p.d_final - 1) * p.final_bits() as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinctness_examples() {
        assert!(!is_b_distinct(&[0; 20], 5));
        assert!(is_b_distinct(&[0; 20], 20));
        // de Bruijn sequence B(2,3) unrolled: every 3-window distinct.
        assert!(is_b_distinct(&[0, 0, 0, 1, 0, 1, 1, 1, 0, 0], 3));
    }

    #[test]
    fn schedule_regression_n16() {
        let p = stage_params(1 << 16, 4, 64).unwrap();
        assert_eq!(p.b, 48);
        assert_eq!(p.t_prime, 6);
        assert_eq!(p.t_dprime, 48 * 6 * 16 * 2);
        assert_eq!(p.sizes.first(), Some(&16384));
        assert_eq!(p.sizes.last(), Some(&32));
        assert_eq!(p.sizes.len(), 10);
    }

    #[test]
    fn window_values_roll() {
        assert_eq!(window_values(&[1, 0, 1, 1], 2), vec![2, 1, 3]);
    }
}
